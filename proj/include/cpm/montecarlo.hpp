#pragma once

// Seeded Monte Carlo averages of products of characteristic polynomials and
// their inverses, the b-integral quadrature for negative moments, and the
// exact kernel-level universality check for non-Gaussian potentials.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/errors.hpp"
#include "cpm/exact_moments.hpp"
#include "cpm/orthopoly.hpp"
#include "cpm/scaled_value.hpp"

namespace cpm {

enum class Sampler { dense_gaussian, metropolis_loggas };

inline std::string to_string(Sampler s) {
  return s == Sampler::dense_gaussian ? "dense-gaussian" : "metropolis-loggas";
}

struct MetropolisSettings {
  int burn_in = 500;       // sweeps per chunk; width tuning happens here
  int thinning = 4;        // sweeps between recorded configurations
  double width = 0.0;      // proposal half-width; 0 picks a start and tunes it
  double target_acceptance = 0.3;
};

struct SampleConfig {
  Ensemble ensemble = Ensemble::gue(1, 1.0);
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::dense_gaussian;
  MetropolisSettings metropolis;

  void validate() const {
    ensemble.validate();
    if (samples < 1) throw std::invalid_argument("SampleConfig: num-samples must be >= 1");
    if (metropolis.width < 0.0) throw std::invalid_argument("SampleConfig: proposal width must be > 0");
    if (metropolis.burn_in < 0 || metropolis.thinning < 1)
      throw std::invalid_argument("SampleConfig: burn-in must be >= 0 and thinning >= 1");
    if (sampler == Sampler::dense_gaussian && ensemble.cls != EnsembleClass::unitary_gaussian)
      throw std::invalid_argument("SampleConfig: dense-gaussian sampler needs the unitary Gaussian ensemble");
  }
};

/// Eigenvalue configurations, row-major (count x M). Paired classes store
/// y = x^2.
struct SampleSet {
  Ensemble ensemble = Ensemble::gue(1, 1.0);
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::dense_gaussian;
  double acceptance = 1.0;
  std::vector<double> values;

  int M() const { return ensemble.M; }
  std::size_t count() const { return values.size() / static_cast<std::size_t>(ensemble.M); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(ensemble.M), static_cast<std::size_t>(ensemble.M)};
  }
};

struct MCEstimate {
  // Estimated average = mean * e^{log_scale}; log_scale is 0 whenever the
  // value fits in a double.
  std::complex<double> mean;
  double standard_error = 0.0;
  double log_scale = 0.0;
  std::size_t effective_samples = 0;
  std::uint64_t seed = 0;
  bool high_variance = false;  // relative standard error above 20%

  ScaledValue scaled_mean() const { return ScaledValue(mean) * ScaledValue::from_log(log_scale); }
  /// |estimate - reference| in standard errors.
  double z_score(std::complex<double> reference) const {
    return std::abs(mean - reference * std::exp(-log_scale)) / standard_error;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline constexpr std::int64_t chunk_size = 2048;

inline std::uint64_t chunk_seed(std::uint64_t seed, std::int64_t chunk) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk) + 1));
}

// Runs fill(chunk) for every chunk, spread over workers. Each chunk owns its
// output slot, so the result does not depend on the worker count.
template <class Fill>
void for_each_chunk(std::int64_t chunks, int workers, Fill fill) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  if (workers == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) fill(c);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t c = w; c < chunks; c += workers) fill(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<double> gue_eigenvalues(int m, double n, std::mt19937_64& rng) {
  std::normal_distribution<double> diag(0.0, 1.0 / std::sqrt(n));
  std::normal_distribution<double> off(0.0, 1.0 / std::sqrt(2.0 * n));
  Eigen::MatrixXcd h(m, m);
  for (int i = 0; i < m; ++i) {
    h(i, i) = diag(rng);
    for (int j = i + 1; j < m; ++j) {
      const double re = off(rng), im = off(rng);
      h(i, j) = {re, im};
      h(j, i) = {re, -im};
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + m};
}

// Log of the one-body weight in the sampled variable.
inline double log_one_body(const Ensemble& e, double u) {
  if (e.paired() && u <= 0.0) return -INFINITY;
  return e.weight.log_weight(u);
}

struct ChainStats {
  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
  double width = 0.0;
};

inline double initial_width(const Ensemble& e) {
  const double n = e.N();
  return e.paired() ? 1.0 / n : 1.0 / std::sqrt(n);
}

// One Metropolis chain producing `count` configurations into out.
inline ChainStats run_chain(const Ensemble& e, const MetropolisSettings& s, std::uint64_t seed, std::int64_t count,
                            double* out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = e.M;
  const double n = e.N();
  std::vector<double> u(m);
  for (int i = 0; i < m; ++i)
    u[i] = e.paired() ? (i + 1.0) / n : (i - 0.5 * (m - 1)) / std::max(1.0, std::sqrt(n * m));
  ChainStats st;
  st.width = s.width > 0.0 ? s.width : initial_width(e);
  const bool tune = s.width == 0.0;

  auto sweep = [&](ChainStats& acc) {
    for (int i = 0; i < m; ++i) {
      const double old = u[i];
      const double proposal = old + st.width * (2.0 * unit(rng) - 1.0);
      double d = log_one_body(e, proposal) - log_one_body(e, old);
      if (d == -INFINITY) {
        ++acc.proposed;
        continue;
      }
      for (int j = 0; j < m; ++j)
        if (j != i) d += 2.0 * (std::log(std::abs(proposal - u[j])) - std::log(std::abs(old - u[j])));
      ++acc.proposed;
      if (d >= 0.0 || unit(rng) < std::exp(d)) {
        u[i] = proposal;
        ++acc.accepted;
      }
    }
  };

  ChainStats window;
  for (int b = 0; b < s.burn_in; ++b) {
    sweep(window);
    if (tune && (b + 1) % 25 == 0) {
      const double rate = static_cast<double>(window.accepted) / static_cast<double>(window.proposed);
      st.width *= std::clamp(rate / s.target_acceptance, 0.5, 2.0);
      window = {};
    }
  }
  for (std::int64_t k = 0; k < count; ++k) {
    for (int t = 0; t < s.thinning; ++t) sweep(st);
    std::copy(u.begin(), u.end(), out + k * m);
  }
  return st;
}

}  // namespace detail

/// One GUE draw: Hermitian M x M with weight exp(-(N/2) Tr X^2).
inline std::vector<double> sample_gue(int m, double n, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_gue: M must be >= 1");
  if (!(n > 0.0)) throw std::invalid_argument("sample_gue: N must be positive");
  std::mt19937_64 rng(seed);
  return detail::gue_eigenvalues(m, n, rng);
}

inline constexpr double min_acceptance = 0.1;
inline constexpr double max_acceptance = 0.7;

/// Metropolis chains on Delta^2(u) prod w(u_i), one chain per chunk of
/// samples. The acceptance rate over all chains must land in [0.1, 0.7].
inline SampleSet sample_loggas(SampleConfig config, int workers = 1) {
  config.sampler = Sampler::metropolis_loggas;
  config.validate();
  const int m = config.ensemble.M;
  const std::int64_t chunks = (config.samples + detail::chunk_size - 1) / detail::chunk_size;
  SampleSet set{config.ensemble, config.seed, config.sampler, 0.0,
                std::vector<double>(static_cast<std::size_t>(config.samples) * m)};
  std::vector<detail::ChainStats> stats(chunks);
  detail::for_each_chunk(chunks, workers, [&](std::int64_t c) {
    const std::int64_t begin = c * detail::chunk_size;
    const std::int64_t count = std::min(detail::chunk_size, config.samples - begin);
    stats[c] = detail::run_chain(config.ensemble, config.metropolis, detail::chunk_seed(config.seed, c), count,
                                 set.values.data() + begin * m);
  });
  std::int64_t acc = 0, prop = 0;
  for (const auto& s : stats) {
    acc += s.accepted;
    prop += s.proposed;
  }
  set.acceptance = static_cast<double>(acc) / static_cast<double>(prop);
  if (set.acceptance < min_acceptance || set.acceptance > max_acceptance)
    throw SamplerTuningError("sample_loggas: acceptance rate " + std::to_string(set.acceptance) +
                             " outside [0.1, 0.7]; adjust the proposal width");
  return set;
}

inline SampleSet draw_samples(const SampleConfig& config, int workers = 1) {
  config.validate();
  if (config.sampler == Sampler::metropolis_loggas) return sample_loggas(config, workers);
  const int m = config.ensemble.M;
  const std::int64_t chunks = (config.samples + detail::chunk_size - 1) / detail::chunk_size;
  SampleSet set{config.ensemble, config.seed, config.sampler, 1.0,
                std::vector<double>(static_cast<std::size_t>(config.samples) * m)};
  detail::for_each_chunk(chunks, workers, [&](std::int64_t c) {
    std::mt19937_64 rng(detail::chunk_seed(config.seed, c));
    const std::int64_t begin = c * detail::chunk_size;
    const std::int64_t end = std::min(begin + detail::chunk_size, config.samples);
    for (std::int64_t k = begin; k < end; ++k) {
      const auto ev = detail::gue_eigenvalues(m, config.ensemble.N(), rng);
      std::copy(ev.begin(), ev.end(), set.values.begin() + k * m);
    }
  });
  return set;
}

namespace detail {

inline constexpr int jackknife_blocks = 50;

// Jackknife over contiguous blocks of per-sample terms value_k * e^{log_k}.
inline MCEstimate jackknife(const std::vector<std::complex<double>>& phase_mag, const std::vector<double>& logs,
                            std::uint64_t seed) {
  const std::size_t n = logs.size();
  MCEstimate r;
  r.seed = seed;
  r.effective_samples = n;
  double ref = -INFINITY;
  for (double l : logs) ref = std::max(ref, l);
  if (ref == -INFINITY) return r;  // every sample is exactly zero
  std::vector<std::complex<double>> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = phase_mag[k] * std::exp(logs[k] - ref);
  const int blocks = static_cast<int>(std::min<std::size_t>(jackknife_blocks, n));
  std::vector<std::complex<double>> block_sum(blocks);
  std::vector<std::size_t> block_n(blocks);
  std::complex<double> total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = k * blocks / n;
    block_sum[b] += v[k];
    ++block_n[b];
    total += v[k];
  }
  r.mean = total / static_cast<double>(n);
  if (blocks > 1) {
    double ss = 0.0;
    std::vector<std::complex<double>> theta(blocks);
    std::complex<double> theta_bar = 0.0;
    for (int b = 0; b < blocks; ++b) {
      theta[b] = (total - block_sum[b]) / static_cast<double>(n - block_n[b]);
      theta_bar += theta[b];
    }
    theta_bar /= static_cast<double>(blocks);
    for (int b = 0; b < blocks; ++b) ss += std::norm(theta[b] - theta_bar);
    r.standard_error = std::sqrt(ss * (blocks - 1.0) / blocks);
  }
  // Fold the scale back when the mean is representable.
  const double m = std::abs(r.mean);
  if (m > 0.0 && std::isfinite(std::log(m) + ref) && std::abs(std::log(m) + ref) < 650.0) {
    const double s = std::exp(ref);
    r.mean *= s;
    r.standard_error *= s;
  } else {
    r.log_scale = ref;
  }
  r.high_variance = m > 0.0 && r.standard_error / std::abs(r.mean) > 0.2;
  return r;
}

}  // namespace detail

/// <prod_a det(l_a - X)^{m_a}> from samples; paired classes use l^2 - y.
inline MCEstimate estimate_fk(const SampleSet& set, const MomentQuery& q) {
  q.validate();
  const std::size_t n = set.count();
  if (n == 0) throw std::invalid_argument("estimate_fk: empty sample set");
  std::vector<std::complex<double>> phase(n);
  std::vector<double> logs(n);
  for (std::size_t k = 0; k < n; ++k) {
    ScaledValue prod = ScaledValue::one();
    for (const auto& [lambda, mult] : q.points) {
      const double u = set.ensemble.paired() ? lambda * lambda : lambda;
      for (double y : set.row(k)) prod *= ScaledValue(u - y).pow(mult);
    }
    phase[k] = prod.is_zero() ? 0.0 : prod.phase();
    logs[k] = prod.is_zero() ? -INFINITY : prod.log_magnitude();
  }
  return detail::jackknife(phase, logs, set.seed);
}

enum class Side { plus, minus };  // +i eps or -i eps

struct SignedPoint {
  double lambda = 0.0;
  int exponent = -1;  // +1 or -1
  Side side = Side::plus;
};

struct NegativeMomentQuery {
  std::vector<SignedPoint> points;
  double epsilon = 1e-4;

  static NegativeMomentQuery equal(double lambda, int k, double eps, Side side = Side::plus) {
    return {std::vector<SignedPoint>(k, SignedPoint{lambda, -1, side}), eps};
  }

  void validate() const {
    if (points.empty()) throw std::invalid_argument("NegativeMomentQuery: no points");
    if (!(epsilon > 0.0)) throw std::invalid_argument("NegativeMomentQuery: epsilon must be > 0");
    for (const auto& p : points) {
      if (p.exponent != 1 && p.exponent != -1)
        throw std::invalid_argument("NegativeMomentQuery: exponents must be +1 or -1");
      if (p.exponent != points.front().exponent)
        throw std::invalid_argument("NegativeMomentQuery: mixed exponent signs are not supported");
    }
  }
};

/// <prod_l det(l_l - X +- i eps)^{-1}> from samples (unitary classes).
inline MCEstimate estimate_negative_moment(const SampleSet& set, const NegativeMomentQuery& q) {
  q.validate();
  if (set.ensemble.paired())
    throw std::invalid_argument("estimate_negative_moment: only the unitary classes are supported");
  const std::size_t n = set.count();
  if (n == 0) throw std::invalid_argument("estimate_negative_moment: empty sample set");
  std::vector<std::complex<double>> phase(n);
  std::vector<double> logs(n);
  for (std::size_t k = 0; k < n; ++k) {
    ScaledValue prod = ScaledValue::one();
    for (const auto& p : q.points) {
      const double im = p.side == Side::plus ? q.epsilon : -q.epsilon;
      for (double x : set.row(k)) {
        const ScaledValue f(std::complex<double>(p.lambda - x, im));
        if (p.exponent < 0)
          prod /= f;
        else
          prod *= f;
      }
    }
    phase[k] = prod.phase();
    logs[k] = prod.log_magnitude();
  }
  return detail::jackknife(phase, logs, set.seed);
}

struct NegativeQuadrature {
  std::complex<double> value;
  double error_bound = 0.0;
  int panels = 0;
};

namespace detail {

// integral over the real line of b^p e^{-N b^2/2} / (l - b + i eps)^m for
// p = 0..2K-2. The pole sits at l + i eps; the contour is moved to
// Im b = -sign(eps) c where nothing is singular, so eps may be arbitrarily
// small.
inline std::vector<std::complex<double>> shifted_moments(double lambda, double eps, int m, double n, int pmax,
                                                         int panels) {
  using boost::math::quadrature::gauss;
  using cd = std::complex<double>;
  const auto& ab = gauss<double, 20>::abscissa();
  const auto& wt = gauss<double, 20>::weights();
  // Line through the saddle of exp(-N b^2 / 2) (l - b)^{-M}; keeps the integrand O(result).
  const double depth = std::max(1.0 / std::sqrt(n), std::sqrt(std::max(m / n - 0.25 * lambda * lambda, 0.0)));
  const double c = (eps > 0 ? -1.0 : 1.0) * depth;
  const double r = std::sqrt(120.0 / n) + depth + 1.0;
  const double lo = std::min(-r, lambda - r), hi = std::max(r, lambda + r);
  const double h = (hi - lo) / panels;
  std::vector<cd> out(pmax + 1);
  auto add = [&](double t, double w) {
    const cd b(t, c);
    const cd g = w * std::exp(-0.5 * n * b * b) / std::pow(cd(lambda, eps) - b, m);
    cd bp = 1.0;
    for (int p = 0; p <= pmax; ++p) {
      out[p] += bp * g;
      bp *= b;
    }
  };
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (std::size_t i = 0; i < ab.size(); ++i) {
      add(mid + 0.5 * h * ab[i], 0.5 * h * wt[i]);
      if (ab[i] != 0.0) add(mid - 0.5 * h * ab[i], 0.5 * h * wt[i]);
    }
  }
  return out;
}

}  // namespace detail

/// <det(l - X + i eps)^{-K}> over the M x M Gaussian ensemble from the K-fold
/// eigenvalue integral
///   int prod db_l Delta^2(b) / prod (l - b_l + i eps)^M exp(-(N/2) sum b^2),
/// normalized so that M = 0 gives 1. The K-fold integral is reduced to a
/// K x K determinant of one-dimensional moments (Andreief).
inline NegativeQuadrature negative_moment_quadrature(std::span<const double> lambdas, int m, double n, double eps) {
  using cd = std::complex<double>;
  const int k = static_cast<int>(lambdas.size());
  if (k < 1 || k > 3) throw std::invalid_argument("negative_moment_quadrature: needs 1 <= K <= 3");
  for (double l : lambdas)
    if (l != lambdas[0]) throw std::invalid_argument("negative_moment_quadrature: lambdas must be equal");
  if (m < 0) throw std::invalid_argument("negative_moment_quadrature: M must be >= 0");
  if (!(n > 0.0)) throw std::invalid_argument("negative_moment_quadrature: N must be positive");
  if (eps == 0.0) throw std::invalid_argument("negative_moment_quadrature: epsilon must be nonzero");
  const double lambda = lambdas[0];

  auto evaluate = [&](int panels) {
    const auto mom = detail::shifted_moments(lambda, eps, m, n, 2 * k - 2, panels);
    Eigen::MatrixXcd a(k, k);
    Eigen::MatrixXd g(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        a(i, j) = mom[i + j];
        // Gaussian moments: sqrt(2 pi / N) (p - 1)!! / N^{p/2} for even p.
        const int p = i + j;
        double gm = 0.0;
        if (p % 2 == 0) {
          gm = std::sqrt(2.0 * std::numbers::pi / n);
          for (int q = p - 1; q > 0; q -= 2) gm *= q / n;
        }
        g(i, j) = gm;
      }
    // Hadamard bound on |det a|: the rounding floor when the determinant cancels.
    double hadamard = 1.0;
    for (int i = 0; i < k; ++i) hadamard *= a.row(i).norm();
    const double gdet = g.determinant();
    return std::pair{cd(a.determinant() / gdet), hadamard / std::abs(gdet)};
  };

  NegativeQuadrature out;
  int panels = 32;
  cd prev = evaluate(panels).first;
  for (; panels <= (1 << 15); panels *= 2) {
    const auto [next, floor] = evaluate(2 * panels);
    out.error_bound = std::abs(next - prev);
    out.value = next;
    out.panels = 2 * panels;
    const double tol = std::max(1e-12 * std::abs(next), 1e-13 * floor);
    if (out.error_bound <= std::max(tol, 1e-300)) return out;
    prev = next;
  }
  throw NumericalError("negative_moment_quadrature: no convergence, achieved error " +
                       std::to_string(out.error_bound));
}

struct UniversalityReport {
  double center = 0.0;
  double rho = 0.0;  // K_N(center, center) / N
  std::vector<double> x;
  std::vector<double> exact;      // R_2 from det K_N
  std::vector<double> predicted;  // R_2 from the sine kernel
  std::vector<double> ratio;
  double sup_deviation = 0.0;
};

/// Two-point function of the ensemble in Dyson variables x = 2 pi N rho
/// (l_1 - l_2), l_{1,2} = center +- x / (4 pi N rho), against the sine-kernel
/// form. Both vanish at x = 0, so the grid should avoid it.
inline UniversalityReport kernel_universality(const MonicBasis& basis, int n, double center,
                                              std::span<const double> xs) {
  UniversalityReport r;
  r.center = center;
  const double kdiag = cd_kernel(basis, n, center, center);
  r.rho = kdiag / n;
  const double scale = 2.0 * std::numbers::pi * n * r.rho;
  for (double x : xs) {
    const double l1 = center + 0.5 * x / scale, l2 = center - 0.5 * x / scale;
    const double k11 = cd_kernel(basis, n, l1, l1), k22 = cd_kernel(basis, n, l2, l2);
    const double k12 = cd_kernel(basis, n, l1, l2);
    const double exact = k11 * k22 - k12 * k12;
    const double s = sine_kernel(n, r.rho, l1, l2);
    const double pred = kdiag * kdiag - s * s;
    r.x.push_back(x);
    r.exact.push_back(exact);
    r.predicted.push_back(pred);
    r.ratio.push_back(exact / pred);
    r.sup_deviation = std::max(r.sup_deviation, std::abs(exact / pred - 1.0));
  }
  return r;
}

// Binary sample file: "CPMS", u32 version, u32 M, u32 family, f64 N,
// u64 seed, u64 count, u32 sampler, u32 ncoeff, f64 coeff[ncoeff],
// then count * M f64 values; all little-endian.
static_assert(std::endian::native == std::endian::little, "sample files assume a little-endian host");

inline void write_samples(const SampleSet& set, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_samples: cannot open " + path);
  auto put = [&](const auto& v) { f.write(reinterpret_cast<const char*>(&v), sizeof v); };
  f.write("CPMS", 4);
  put(std::uint32_t{1});
  put(static_cast<std::uint32_t>(set.ensemble.M));
  put(static_cast<std::uint32_t>(set.ensemble.weight.family));
  put(set.ensemble.N());
  put(set.seed);
  put(static_cast<std::uint64_t>(set.count()));
  put(static_cast<std::uint32_t>(set.sampler));
  put(static_cast<std::uint32_t>(set.ensemble.weight.potential.size()));
  for (double c : set.ensemble.weight.potential) put(c);
  f.write(reinterpret_cast<const char*>(set.values.data()),
          static_cast<std::streamsize>(set.values.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write_samples: write failed for " + path);
}

inline SampleSet read_samples(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_samples: cannot open " + path);
  auto get = [&](auto& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!f) throw std::runtime_error("read_samples: truncated header in " + path);
  };
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "CPMS", 4) != 0) throw std::runtime_error("read_samples: not a sample file: " + path);
  std::uint32_t version = 0, m = 0, family = 0, sampler = 0, ncoeff = 0;
  double n = 0.0;
  std::uint64_t seed = 0, count = 0;
  get(version);
  if (version != 1) throw std::runtime_error("read_samples: unsupported version");
  get(m);
  get(family);
  get(n);
  get(seed);
  get(count);
  get(sampler);
  get(ncoeff);
  if (family > 3 || sampler > 1 || m == 0 || ncoeff > 64) throw std::runtime_error("read_samples: corrupt header");
  WeightSpec w{static_cast<WeightFamily>(family), n, std::vector<double>(ncoeff)};
  for (double& c : w.potential) get(c);
  SampleSet set;
  switch (w.family) {
    case WeightFamily::laguerre_half: set.ensemble = Ensemble::symplectic(static_cast<int>(m), n); break;
    case WeightFamily::laguerre_minus_half: set.ensemble = Ensemble::orthogonal(static_cast<int>(m), n); break;
    default: set.ensemble = Ensemble::unitary(static_cast<int>(m), w);
  }
  set.seed = seed;
  set.sampler = static_cast<Sampler>(sampler);
  set.values.resize(count * m);
  f.read(reinterpret_cast<char*>(set.values.data()), static_cast<std::streamsize>(set.values.size() * sizeof(double)));
  if (!f) throw std::runtime_error("read_samples: truncated data in " + path);
  return set;
}

inline nlohmann::json to_json(const MCEstimate& e) {
  return {{"mean_re", e.mean.real()},        {"mean_im", e.mean.imag()},
          {"standard_error", e.standard_error}, {"log_scale", e.log_scale},
          {"effective_samples", e.effective_samples}, {"seed", e.seed},
          {"high_variance", e.high_variance}};
}

}  // namespace cpm
