#pragma once

#include <stdexcept>
#include <string>

namespace cpm {

// Argument and domain errors are reported with std::invalid_argument and
// std::out_of_range. Everything that goes wrong inside a numerical procedure
// derives from NumericalError so callers (the CLI in particular) can map it to
// its own exit code.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Stieltjes discretization produced a non-positive recurrence coefficient.
class StieltjesBreakdown : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The two independent routes to R_K disagree.
class RouteMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Metropolis acceptance rate outside the admissible window after tuning.
class SamplerTuningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cpm
