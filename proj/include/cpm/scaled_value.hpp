#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cpm {

/// A real or complex number held as (log-magnitude, unit phase).
///
/// Quantities such as (2 pi N rho)^{K^2} e^{-NK} or products of high-degree
/// polynomial values leave the range of double long before the final ratio
/// does. All determinant and product pipelines work on ScaledValue and only
/// convert back at the reporting step.
///
/// Zero is a flag: it absorbs any log-magnitude, multiplies to zero and is the
/// identity for addition.
class ScaledValue {
 public:
  using complex = std::complex<double>;

  /// Zero.
  ScaledValue() = default;

  explicit ScaledValue(double x) {
    if (x != 0.0) {
      zero_ = false;
      log_mag_ = std::log(std::abs(x));
      phase_ = complex(x > 0.0 ? 1.0 : -1.0, 0.0);
    }
  }

  explicit ScaledValue(complex z) {
    const double m = std::abs(z);
    if (m != 0.0) {
      zero_ = false;
      log_mag_ = std::log(m);
      phase_ = z / m;
    }
  }

  /// Value e^{log_magnitude} * phase. The phase is renormalized to unit modulus.
  static ScaledValue from_log(double log_magnitude, complex phase = {1.0, 0.0}) {
    ScaledValue v;
    const double m = std::abs(phase);
    if (m == 0.0 || log_magnitude == -std::numeric_limits<double>::infinity()) return v;
    v.zero_ = false;
    v.log_mag_ = log_magnitude;
    v.phase_ = phase / m;
    return v;
  }

  /// Real value with given sign (+1 / -1; 0 gives zero).
  static ScaledValue from_log_signed(double log_magnitude, int sign) {
    if (sign == 0) return {};
    return from_log(log_magnitude, complex(sign > 0 ? 1.0 : -1.0, 0.0));
  }

  static ScaledValue zero() { return {}; }
  static ScaledValue one() { return from_log(0.0); }

  bool is_zero() const { return zero_; }
  /// Natural log of the modulus; -inf for zero.
  double log_magnitude() const {
    return zero_ ? -std::numeric_limits<double>::infinity() : log_mag_;
  }
  complex phase() const { return zero_ ? complex(0.0, 0.0) : phase_; }

  /// Sign of the real part of the phase (+1, -1) or 0 for zero.
  int sign() const {
    if (zero_) return 0;
    return phase_.real() >= 0.0 ? 1 : -1;
  }

  double to_double() const { return zero_ ? 0.0 : std::exp(log_mag_) * phase_.real(); }
  complex to_complex() const { return zero_ ? complex{} : std::exp(log_mag_) * phase_; }

  ScaledValue abs() const {
    if (zero_) return {};
    return from_log(log_mag_);
  }

  ScaledValue operator-() const {
    ScaledValue v = *this;
    v.phase_ = -v.phase_;
    return v;
  }

  ScaledValue& operator*=(const ScaledValue& o) {
    if (zero_ || o.zero_) {
      *this = ScaledValue{};
      return *this;
    }
    log_mag_ += o.log_mag_;
    phase_ = normalized(phase_ * o.phase_);
    return *this;
  }

  ScaledValue& operator/=(const ScaledValue& o) {
    if (o.zero_) throw std::domain_error("ScaledValue: division by zero");
    if (zero_) return *this;
    log_mag_ -= o.log_mag_;
    phase_ = normalized(phase_ * std::conj(o.phase_));
    return *this;
  }

  /// Addition through the max-log rescaling rule.
  ScaledValue& operator+=(const ScaledValue& o) {
    if (o.zero_) return *this;
    if (zero_) {
      *this = o;
      return *this;
    }
    const double m = std::max(log_mag_, o.log_mag_);
    const complex s = phase_ * std::exp(log_mag_ - m) + o.phase_ * std::exp(o.log_mag_ - m);
    const double a = std::abs(s);
    if (a == 0.0) {
      *this = ScaledValue{};
      return *this;
    }
    log_mag_ = m + std::log(a);
    phase_ = s / a;
    return *this;
  }

  ScaledValue& operator-=(const ScaledValue& o) { return *this += -o; }

  friend ScaledValue operator*(ScaledValue a, const ScaledValue& b) { return a *= b; }
  friend ScaledValue operator/(ScaledValue a, const ScaledValue& b) { return a /= b; }
  friend ScaledValue operator+(ScaledValue a, const ScaledValue& b) { return a += b; }
  friend ScaledValue operator-(ScaledValue a, const ScaledValue& b) { return a -= b; }

  ScaledValue pow(int k) const {
    if (k == 0) return one();
    if (zero_) {
      if (k < 0) throw std::domain_error("ScaledValue: negative power of zero");
      return {};
    }
    ScaledValue v;
    v.zero_ = false;
    v.log_mag_ = log_mag_ * k;
    v.phase_ = normalized(std::pow(phase_, k));
    return v;
  }

  friend std::ostream& operator<<(std::ostream& os, const ScaledValue& v) {
    if (v.zero_) return os << "0";
    return os << "exp(" << v.log_mag_ << ")*" << v.phase_;
  }

 private:
  static complex normalized(complex p) {
    // Real phases stay exactly real.
    if (p.imag() == 0.0) return complex(p.real() >= 0.0 ? 1.0 : -1.0, 0.0);
    return p / std::abs(p);
  }

  bool zero_ = true;
  double log_mag_ = 0.0;
  complex phase_{1.0, 0.0};
};

/// Relative difference of two ScaledValues, measured on the larger modulus.
inline double relative_difference(const ScaledValue& a, const ScaledValue& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  const double m = std::max(a.log_magnitude(), b.log_magnitude());
  const auto za = a.is_zero() ? std::complex<double>{} : a.phase() * std::exp(a.log_magnitude() - m);
  const auto zb = b.is_zero() ? std::complex<double>{} : b.phase() * std::exp(b.log_magnitude() - m);
  return std::abs(za - zb);
}

}  // namespace cpm
