#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cpm/scaled_value.hpp"

namespace cpm {

/// Row-major square matrix of real ScaledValue entries.
using ScaledMatrix = std::vector<std::vector<ScaledValue>>;

/// Determinant of a real matrix whose entries may span hundreds of orders of
/// magnitude. Rows and then columns are divided by their largest modulus (the
/// log factors are accumulated), after which the O(1) matrix goes through LU
/// with partial pivoting.
inline ScaledValue scaled_determinant(const ScaledMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (n == 0) return ScaledValue::one();
  for (const auto& row : a)
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw std::invalid_argument("scaled_determinant: matrix is not square");

  double log_factor = 0.0;
  std::vector<double> row_log(n), col_log(n, -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : a[i]) m = std::max(m, v.log_magnitude());
    if (m == -std::numeric_limits<double>::infinity()) return ScaledValue{};
    row_log[i] = m;
    log_factor += m;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      col_log[j] = std::max(col_log[j], a[i][j].log_magnitude() - row_log[i]);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (col_log[j] == -std::numeric_limits<double>::infinity()) return ScaledValue{};
    log_factor += col_log[j];
  }

  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& v = a[i][j];
      m(i, j) = v.is_zero() ? 0.0 : v.sign() * std::exp(v.log_magnitude() - row_log[i] - col_log[j]);
    }
  const double d = Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
  return ScaledValue(d) * ScaledValue::from_log(log_factor);
}

/// Plain double version for small, well-scaled matrices.
inline double determinant(const std::vector<std::vector<double>>& a) {
  ScaledMatrix s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (double v : a[i]) s[i].emplace_back(v);
  return scaled_determinant(s).to_double();
}

}  // namespace cpm
