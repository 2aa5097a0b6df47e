#pragma once

// Closed-form large-N predictions: the universal constant gamma_K, the
// factorial Hankel determinant behind it, bulk and origin kernels, moment
// scaling laws and the subset-residue form of the Dyson-limit correlator.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "cpm/scaled_value.hpp"

namespace cpm {

using rational = boost::multiprecision::cpp_rational;

struct UniversalConstant {
  int K = 0;
  rational gamma;
  double value = 0.0;
};

inline rational factorial_rational(int n) {
  boost::multiprecision::cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return rational(f);
}

/// gamma_K = prod_{l=0}^{K-1} l! / (l+K)!
inline UniversalConstant gamma_k(int k) {
  if (k < 1) throw std::invalid_argument("gamma_k: K must be >= 1");
  rational g = 1;
  for (int l = 0; l < k; ++l) g *= factorial_rational(l) / factorial_rational(l + k);
  return {k, g, static_cast<double>(g)};
}

/// Exact determinant of a rational matrix by Gaussian elimination.
inline rational rational_determinant(std::vector<std::vector<rational>> a) {
  const std::size_t n = a.size();
  rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

/// det_{0<=i,j<K} 1/(2K-i-j-1)!, checked against
/// (-1)^{K(K-1)/2} det = gamma_K for K <= 12.
inline rational factorial_hankel_det(int k) {
  if (k < 1) throw std::invalid_argument("factorial_hankel_det: K must be >= 1");
  std::vector<std::vector<rational>> a(k, std::vector<rational>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a[i][j] = 1 / factorial_rational(2 * k - i - j - 1);
  const rational det = rational_determinant(std::move(a));
  if (k <= 12) {
    const rational signed_det = ((k * (k - 1) / 2) % 2 == 0) ? det : rational(-det);
    if (signed_det != gamma_k(k).gamma)
      throw std::logic_error("factorial_hankel_det: identity with gamma_K violated at K = " + std::to_string(k));
  }
  return det;
}

/// sin(pi N rho (l1 - l2)) / (pi (l1 - l2)); N rho on the diagonal.
inline double sine_kernel(double n, double rho, double l1, double l2) {
  const double d = l1 - l2;
  const double a = std::numbers::pi * n * rho * d;
  if (std::abs(a) < 1e-8) return n * rho * (1.0 - a * a / 6.0);
  return std::sin(a) / (std::numbers::pi * d);
}

namespace detail {
// sin(N d) / (2 pi d) with its limit N / (2 pi).
inline double half_sinc(double n, double d) {
  const double a = n * d;
  if (std::abs(a) < 1e-8) return n / (2.0 * std::numbers::pi) * (1.0 - a * a / 6.0);
  return std::sin(a) / (2.0 * std::numbers::pi * d);
}
}  // namespace detail

/// Symplectic kernel near the origin.
inline double ksp_kernel(double n, double l1, double l2) {
  return detail::half_sinc(n, l1 - l2) - detail::half_sinc(n, l1 + l2);
}

/// Orthogonal (even) kernel near the origin.
inline double ko_kernel(double n, double l1, double l2) {
  return detail::half_sinc(n, l1 - l2) + detail::half_sinc(n, l1 + l2);
}

/// Semicircle density of the Gaussian ensemble, (1/2pi) sqrt(4 - l^2).
inline double semicircle_density(double lambda) {
  if (std::abs(lambda) >= 2.0) return 0.0;
  return std::sqrt(4.0 - lambda * lambda) / (2.0 * std::numbers::pi);
}

/// Universal moment (2 pi)^{-K} (2 pi N rho)^{K^2} gamma_K.
inline ScaledValue m2k_prediction(double n, double rho, int k) {
  if (k < 1) throw std::invalid_argument("m2k_prediction: K must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("m2k_prediction: rho must be positive");
  const double lg = -k * std::log(2.0 * std::numbers::pi) +
                    static_cast<double>(k) * k * std::log(2.0 * std::numbers::pi * n * rho) +
                    std::log(gamma_k(k).value);
  return ScaledValue::from_log(lg);
}

namespace detail {
inline double log_factorial_ratio_product(int k_hi) {
  // sum_{l=1}^{k_hi} log(l! / (2l)!)
  double s = 0.0;
  for (int l = 1; l <= k_hi; ++l) s += std::lgamma(l + 1.0) - std::lgamma(2.0 * l + 1.0);
  return s;
}
}  // namespace detail

/// prod_{l=1}^K l!/(2l)! (2N)^{K(K+1)/2} / pi^{K/2}
inline ScaledValue sp_moment_prediction(double n, int k) {
  if (k < 1) throw std::invalid_argument("sp_moment_prediction: K must be >= 1");
  return ScaledValue::from_log(detail::log_factorial_ratio_product(k) +
                               0.5 * k * (k + 1) * std::log(2.0 * n) - 0.5 * k * std::log(std::numbers::pi));
}

/// prod_{l=1}^{K-1} l!/(2l)! (2N)^{K(K-1)/2} / pi^{K/2}
inline ScaledValue o_moment_prediction(double n, int k) {
  if (k < 1) throw std::invalid_argument("o_moment_prediction: K must be >= 1");
  return ScaledValue::from_log(detail::log_factorial_ratio_product(k - 1) +
                               0.5 * k * (k - 1) * std::log(2.0 * n) - 0.5 * k * std::log(std::numbers::pi));
}

/// Scaling frame x_a = 2 pi N rho (l_a - l) around a bulk point.
struct DysonFrame {
  double N = 1.0;
  double lambda = 0.0;
  double rho = 1.0 / std::numbers::pi;
  std::vector<double> x;

  DysonFrame(double n, double center, double density, std::vector<double> xs)
      : N(n), lambda(center), rho(density), x(std::move(xs)) {
    if (!(N > 0.0)) throw std::invalid_argument("DysonFrame: N must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("DysonFrame: rho must be positive");
    double s = 0.0, scale = 1.0;
    for (double v : x) {
      s += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(s) > 1e-12 * scale) throw std::invalid_argument("DysonFrame: scaling variables must sum to zero");
  }

  /// Frame for eigenvalue arguments l_a; the center is their mean and the
  /// density is the Gaussian semicircle unless supplied.
  static DysonFrame from_lambdas(double n, const std::vector<double>& lambdas, double rho = -1.0) {
    double c = 0.0;
    for (double l : lambdas) c += l;
    c /= static_cast<double>(lambdas.size());
    const double r = rho > 0.0 ? rho : semicircle_density(c);
    std::vector<double> xs;
    for (double l : lambdas) xs.push_back(2.0 * std::numbers::pi * n * r * (l - c));
    // Remove the rounding residue of the mean.
    double s = 0.0;
    for (double v : xs) s += v;
    for (double& v : xs) v -= s / static_cast<double>(xs.size());
    return DysonFrame(n, c, r, std::move(xs));
  }
};

/// Dyson-limit value of exp(-(N/2) sum V) F_{2K}:
///   (2 pi N rho)^{K^2} e^{-NK} i^K (-1)^{K(K-1)/2}
///   * sum_{|S|=K} e^{-i sum_S x} / prod_{a in S, b notin S} (x_a - x_b),
/// the residue evaluation of the K-fold contour integral. The subset sum
/// cancels heavily for small x and is accumulated in 50-digit arithmetic.
inline ScaledValue dyson_correlator(const DysonFrame& frame) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const int n2 = static_cast<int>(frame.x.size());
  if (n2 < 2 || n2 % 2 != 0) throw std::invalid_argument("dyson_correlator: needs 2K scaling variables");
  if (n2 > 30) throw std::invalid_argument("dyson_correlator: K too large for the subset sum");
  const int k = n2 / 2;
  for (int a = 0; a < n2; ++a)
    for (int b = 0; b < a; ++b)
      if (frame.x[a] == frame.x[b])
        throw std::invalid_argument("dyson_correlator: coincident scaling variables; use dyson_correlator_equal");
  std::vector<big> x(frame.x.begin(), frame.x.end());
  big re = 0, im = 0;
  for (std::uint32_t mask = 0; mask < (1u << n2); ++mask) {
    if (std::popcount(mask) != k) continue;
    big phase = 0, den = 1;
    for (int a = 0; a < n2; ++a) {
      if (!(mask >> a & 1u)) continue;
      phase += x[a];
      for (int b = 0; b < n2; ++b)
        if (!(mask >> b & 1u)) den *= x[a] - x[b];
    }
    re += boost::multiprecision::cos(phase) / den;
    im -= boost::multiprecision::sin(phase) / den;
  }
  std::complex<double> s(static_cast<double>(re), static_cast<double>(im));
  // i^K (-1)^{K(K-1)/2}
  std::complex<double> unit = std::pow(std::complex<double>(0.0, 1.0), k);
  if ((k * (k - 1) / 2) % 2) unit = -unit;
  const double lg = static_cast<double>(k) * k * std::log(2.0 * std::numbers::pi * frame.N * frame.rho) -
                    frame.N * k;
  return ScaledValue(s * unit) * ScaledValue::from_log(lg);
}

/// All-x-equal limit: (2 pi N rho)^{K^2} e^{-NK} gamma_K.
inline ScaledValue dyson_correlator_equal(double n, double rho, int k) {
  if (k < 1) throw std::invalid_argument("dyson_correlator_equal: K must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("dyson_correlator_equal: rho must be positive");
  const double lg = static_cast<double>(k) * k * std::log(2.0 * std::numbers::pi * n * rho) - n * k +
                    std::log(gamma_k(k).value);
  return ScaledValue::from_log(lg);
}

}  // namespace cpm
