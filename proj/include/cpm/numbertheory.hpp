#pragma once

// Arithmetic side of the moment conjecture: Dirichlet coefficients d_K(n) of
// zeta^K, the Euler product a_K, partial sums of d_K^2, zeta on the critical
// line and the empirical 2K-th moment of |zeta(1/2 + it)|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "cpm/asymptotics.hpp"
#include "cpm/errors.hpp"

namespace cpm {

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("d_K(n) exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("sum of d_K(n)^2 exceeds 64 bits");
  return r;
}

// C(K + j - 1, j) = d_K(p^j)
inline std::uint64_t prime_power_coefficient(int k, int j) {
  std::uint64_t c = 1;
  for (int i = 1; i <= j; ++i) c = checked_mul(c, static_cast<std::uint64_t>(k + i - 1)) / static_cast<std::uint64_t>(i);
  return c;
}

inline double prime_power_coefficient_real(int k, int j) {
  return std::exp(std::lgamma(k + j + 0.0) - std::lgamma(k + 0.0) - std::lgamma(j + 1.0));
}

}  // namespace detail

/// Primes up to and including limit (sieve of Eratosthenes).
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

/// d_K(n): number of ordered factorizations n = n_1 ... n_K.
inline std::uint64_t dirichlet_dk(int k, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("dirichlet_dk: n must be >= 1");
  if (k < 1) throw std::invalid_argument("dirichlet_dk: K must be >= 1");
  std::uint64_t d = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    int j = 0;
    while (n % p == 0) {
      n /= p;
      ++j;
    }
    if (j > 0) d = detail::checked_mul(d, detail::prime_power_coefficient(k, j));
  }
  if (n > 1) d = detail::checked_mul(d, static_cast<std::uint64_t>(k));
  return d;
}

struct DirichletTable {
  int K = 1;
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> values;  // values[n] = d_K(n), values[0] unused

  std::uint64_t operator()(std::uint64_t n) const { return values.at(n); }
};

inline constexpr std::uint64_t dk_sieve_max = 1'000'000'000;

/// d_K(n) for all n <= x, by a linear sieve over smallest prime factors.
inline DirichletTable dk_sieve(int k, std::uint64_t x) {
  if (k < 1) throw std::invalid_argument("dk_sieve: K must be >= 1");
  if (x < 1) throw std::invalid_argument("dk_sieve: x must be >= 1");
  if (x > dk_sieve_max) throw std::length_error("dk_sieve: x above 1e9 refused (memory guard)");
  DirichletTable t{k, x, std::vector<std::uint64_t>(x + 1, 0)};
  std::vector<std::uint32_t> primes;
  std::vector<std::uint8_t> exponent(x + 1, 0);  // exponent of the smallest prime factor
  std::vector<std::uint64_t> coeff(64);
  for (int j = 0; j < 64; ++j) coeff[j] = detail::prime_power_coefficient(k, j);
  t.values[1] = 1;
  for (std::uint64_t i = 2; i <= x; ++i) {
    if (t.values[i] == 0) {
      primes.push_back(static_cast<std::uint32_t>(i));
      t.values[i] = static_cast<std::uint64_t>(k);
      exponent[i] = 1;
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t m = i * p;
      if (m > x) break;
      if (i % p == 0) {
        // m = p^{e+1} r with gcd(r, p) = 1
        const int e = exponent[i];
        t.values[m] = t.values[i] / coeff[e] * coeff[e + 1];
        exponent[m] = static_cast<std::uint8_t>(e + 1);
        break;
      }
      t.values[m] = detail::checked_mul(t.values[i], static_cast<std::uint64_t>(k));
      exponent[m] = 1;
    }
  }
  return t;
}

struct EulerProduct {
  double value = 0.0;
  double error_bound = 0.0;  // bound on |a_K - value| from the omitted primes
  std::uint32_t prime_cutoff = 0;
  std::size_t primes_used = 0;
};

/// Local factor (1 - 1/p^s)^{K^2} sum_j d_K(p^j)^2 p^{-js}, as a log.
inline double log_local_factor(int k, double p, double s) {
  const double x = std::pow(p, -s);
  double sum = 0.0;
  for (int j = 0;; ++j) {
    const double c = detail::prime_power_coefficient_real(k, j);
    const double term = c * c * std::pow(x, j);
    sum += term;
    if (j > 0 && term < 1e-18 * sum) break;
    if (j > 10000) throw NumericalError("log_local_factor: series did not converge");
  }
  return static_cast<double>(k) * k * std::log1p(-x) + std::log(sum);
}

/// a_K = prod_p (1 - 1/p)^{K^2} sum_j d_K(p^j)^2 p^{-j}, truncated at p <= cutoff.
/// The omitted tail is bounded by K^4 sum_{n > P} 1/n^2 < K^4 / P.
inline EulerProduct a_k_euler_product(int k, std::uint32_t prime_cutoff,
                                      std::optional<double> tolerance = std::nullopt) {
  if (k < 1) throw std::invalid_argument("a_k_euler_product: K must be >= 1");
  if (prime_cutoff < 100) throw std::invalid_argument("a_k_euler_product: prime cutoff must be >= 100");
  EulerProduct out;
  out.prime_cutoff = prime_cutoff;
  const double k4 = std::pow(static_cast<double>(k), 4);
  out.error_bound = k == 1 ? 0.0 : k4 / prime_cutoff;
  if (tolerance && out.error_bound > *tolerance)
    throw std::invalid_argument("a_k_euler_product: cutoff " + std::to_string(prime_cutoff) +
                                " cannot reach tolerance " + std::to_string(*tolerance));
  if (k == 1) {
    out.value = 1.0;
    out.primes_used = primes_up_to(prime_cutoff).size();
    return out;
  }
  const auto primes = primes_up_to(prime_cutoff);
  double log_sum = 0.0, comp = 0.0;  // Kahan
  for (std::uint32_t p : primes) {
    const double y = log_local_factor(k, p, 1.0) - comp;
    const double t = log_sum + y;
    comp = (t - log_sum) - y;
    log_sum = t;
  }
  out.value = std::exp(log_sum);
  out.primes_used = primes.size();
  // |a - a_P| <= a_P (e^{bound} - 1) for the log tail; report on the value scale.
  out.error_bound = out.value * std::expm1(out.error_bound);
  return out;
}

struct DivisorSquareSums {
  int K = 1;
  std::uint64_t x = 0;
  std::uint64_t exact = 0;          // sum_{n<=x} d_K(n)^2
  double prediction = 0.0;          // a_K / Gamma(K^2) x log^{K^2-1} x
  double weighted = 0.0;            // sum_{n<=x} d_K(n)^2 / n
  double weighted_prediction = 0.0; // a_K / Gamma(K^2+1) log^{K^2} x
  double a_k = 0.0;
};

inline DivisorSquareSums sum_dk_squared(int k, std::uint64_t x, std::uint32_t prime_cutoff = 100'000) {
  if (x < 2) throw std::invalid_argument("sum_dk_squared: x must be >= 2");
  const auto table = dk_sieve(k, x);
  DivisorSquareSums r;
  r.K = k;
  r.x = x;
  double comp = 0.0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    const std::uint64_t d = table.values[n];
    r.exact = detail::checked_add(r.exact, detail::checked_mul(d, d));
    const double y = static_cast<double>(d) * static_cast<double>(d) / static_cast<double>(n) - comp;
    const double t = r.weighted + y;
    comp = (t - r.weighted) - y;
    r.weighted = t;
  }
  r.a_k = a_k_euler_product(k, prime_cutoff).value;
  const double k2 = static_cast<double>(k) * k;
  const double lx = std::log(static_cast<double>(x));
  r.prediction = r.a_k / std::tgamma(k2) * static_cast<double>(x) * std::pow(lx, k2 - 1.0);
  r.weighted_prediction = r.a_k / std::tgamma(k2 + 1.0) * std::pow(lx, k2);
  return r;
}

inline constexpr double zeta_envelope = 1e5;

/// zeta(1/2 + it) by Euler-Maclaurin summation. The tail uses as many
/// Bernoulli corrections as needed (at most 30) for the remainder bound to
/// drop below 1e-12; n^{-1/2} and log n are cached between calls.
class ZetaEvaluator {
 public:
  using complex = std::complex<double>;

  complex operator()(double t) {
    if (!(std::abs(t) <= zeta_envelope))
      throw std::out_of_range("zeta_critical: |t| must be <= 1e5");
    const int n_terms = 10 + static_cast<int>(std::ceil(std::abs(t) / 2.0));
    ensure_cache(n_terms);
    const complex s(0.5, t);
    double re = 0.0, im = 0.0;
    for (int n = 1; n < n_terms; ++n) {
      const double a = -t * log_[n];
      re += inv_sqrt_[n] * std::cos(a);
      im += inv_sqrt_[n] * std::sin(a);
    }
    complex sum(re, im);
    const double nn = n_terms;
    const complex n_pow_s = std::exp(-s * log_[n_terms]);  // N^{-s}
    sum += nn * n_pow_s / (s - 1.0) + 0.5 * n_pow_s;
    // sum_k B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    complex rising = s;  // s (s+1) ... (s + 2k - 2)
    complex npow = n_pow_s / nn;
    double last_bound = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 30; ++k) {
      const double coeff = bernoulli_[k] / std::tgamma(2.0 * k + 1.0);
      const complex term = coeff * rising * npow;
      sum += term;
      // Remainder after k corrections is at most |next term| |s + 2k + 1| / (sigma + 2k + 1).
      const complex next_rising = rising * (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
      const double next = std::abs(bernoulli_[k + 1] / std::tgamma(2.0 * k + 3.0) * next_rising * npow / (nn * nn));
      const double bound = next * std::abs(s + (2.0 * k + 1.0)) / (0.5 + 2.0 * k + 1.0);
      last_bound = bound;
      if (bound < 1e-12) break;
      rising = next_rising;
      npow /= nn * nn;
    }
    last_error_bound_ = last_bound;
    return sum;
  }

  double last_error_bound() const { return last_error_bound_; }

 private:
  void ensure_cache(int n) {
    if (static_cast<int>(log_.size()) > n) return;
    const int old = static_cast<int>(log_.size());
    log_.resize(n + 1);
    inv_sqrt_.resize(n + 1);
    for (int i = std::max(old, 1); i <= n; ++i) {
      log_[i] = std::log(static_cast<double>(i));
      inv_sqrt_[i] = 1.0 / std::sqrt(static_cast<double>(i));
    }
    if (old == 0) log_[0] = inv_sqrt_[0] = 0.0;
  }

  static std::vector<double> bernoulli_table() {
    std::vector<double> b(32);
    for (int k = 0; k < 32; ++k) b[k] = boost::math::bernoulli_b2n<double>(k);
    return b;
  }

  std::vector<double> log_, inv_sqrt_;
  std::vector<double> bernoulli_ = bernoulli_table();
  double last_error_bound_ = 0.0;
};

inline std::complex<double> zeta_critical(double t) {
  ZetaEvaluator z;
  return z(t);
}

struct MomentWindow {
  double T = 1000.0;
  int K = 1;
  double step = 0.0;  // 0 selects the largest admissible step

  static double max_step(double t) { return 2.0 * std::numbers::pi / std::log(t / (2.0 * std::numbers::pi)) / 8.0; }

  void validate() const {
    if (!(T > 10.0)) throw std::invalid_argument("MomentWindow: T must exceed 10");
    if (T > zeta_envelope) throw std::invalid_argument("MomentWindow: T beyond the zeta accuracy envelope");
    if (K < 1) throw std::invalid_argument("MomentWindow: K must be >= 1");
    if (step < 0.0) throw std::invalid_argument("MomentWindow: step must be positive");
    if (step > max_step(T))
      throw std::invalid_argument("MomentWindow: step " + std::to_string(step) +
                                  " does not resolve the oscillations (max " + std::to_string(max_step(T)) + ")");
  }
};

struct ZetaMoment {
  double T = 0.0;
  int K = 1;
  double empirical = 0.0;  // (1/T) int_0^T |zeta(1/2+it)|^{2K} dt
  double predicted = 0.0;  // gamma_K a_K (log T)^{K^2}
  double ratio = 0.0;
  double step = 0.0;
  std::size_t intervals = 0;
};

/// Composite Simpson over [0, T]. Samples are computed by `workers` threads on
/// fixed index ranges and summed in index order, so the result does not depend
/// on the worker count.
inline ZetaMoment zeta_moment(const MomentWindow& w, unsigned workers = 1,
                              std::uint32_t prime_cutoff = 100'000) {
  w.validate();
  const double h_max = w.step > 0.0 ? w.step : MomentWindow::max_step(w.T);
  auto intervals = static_cast<std::size_t>(std::ceil(w.T / h_max));
  if (intervals % 2) ++intervals;
  const double h = w.T / static_cast<double>(intervals);
  std::vector<double> f(intervals + 1);
  workers = std::max(1u, workers);
  const std::size_t chunk = (f.size() + workers - 1) / workers;
  auto run = [&](std::size_t lo, std::size_t hi) {
    ZetaEvaluator z;
    for (std::size_t i = lo; i < hi; ++i) f[i] = std::pow(std::norm(z(h * static_cast<double>(i))), w.K);
  };
  std::vector<std::thread> pool;
  for (unsigned c = 1; c < workers; ++c) {
    const std::size_t lo = c * chunk, hi = std::min(f.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  run(0, std::min(f.size(), chunk));
  for (auto& th : pool) th.join();

  double s = f.front() + f.back();
  for (std::size_t i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  ZetaMoment out;
  out.T = w.T;
  out.K = w.K;
  out.step = h;
  out.intervals = intervals;
  out.empirical = s * h / 3.0 / w.T;
  const double k2 = static_cast<double>(w.K) * w.K;
  out.predicted = gamma_k(w.K).value * a_k_euler_product(w.K, prime_cutoff).value * std::pow(std::log(w.T), k2);
  out.ratio = out.empirical / out.predicted;
  return out;
}

}  // namespace cpm
