#pragma once

// Monic orthogonal polynomials for the weights used by the moment formulas:
// recurrence construction, scaled evaluation (values and derivatives), the
// Christoffel-Darboux kernel, and Gauss rules derived from the recurrence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

#include "cpm/errors.hpp"
#include "cpm/scaled_value.hpp"

namespace cpm {

enum class WeightFamily {
  gaussian,             // w(x) = exp(-N x^2 / 2) on the real line
  general_potential,    // w(x) = exp(-N V(x)), V an even-degree polynomial
  laguerre_half,        // w(y) = y^{1/2} exp(-N y) on [0, inf)
  laguerre_minus_half,  // w(y) = y^{-1/2} exp(-N y) on [0, inf)
};

inline std::string to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::gaussian: return "gaussian";
    case WeightFamily::general_potential: return "general-potential";
    case WeightFamily::laguerre_half: return "laguerre-half";
    case WeightFamily::laguerre_minus_half: return "laguerre-minus-half";
  }
  return "unknown";
}

/// Quadrature tolerances shared by the integration routines of the library.
struct QuadratureTolerance {
  double absolute = 1e-10;
  double relative = 1e-8;
};

struct WeightSpec {
  WeightFamily family = WeightFamily::gaussian;
  double scale = 1.0;  // N
  // V(x) = sum_k potential[k] x^k (general_potential only).
  std::vector<double> potential;

  static WeightSpec gaussian(double n) { return {WeightFamily::gaussian, n, {}}; }
  static WeightSpec general(double n, std::vector<double> coefficients) {
    return {WeightFamily::general_potential, n, std::move(coefficients)};
  }
  static WeightSpec laguerre_half(double n) { return {WeightFamily::laguerre_half, n, {}}; }
  static WeightSpec laguerre_minus_half(double n) {
    return {WeightFamily::laguerre_minus_half, n, {}};
  }
  /// x^2/2 + g x^4.
  static WeightSpec quartic(double n, double g) { return general(n, {0.0, 0.0, 0.5, 0.0, g}); }

  void validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("WeightSpec: scale N must be positive");
    if (family == WeightFamily::general_potential) {
      std::size_t deg = potential.size();
      while (deg > 0 && potential[deg - 1] == 0.0) --deg;
      if (deg < 3 || (deg - 1) % 2 != 0 || potential[deg - 1] <= 0.0)
        throw std::invalid_argument(
            "WeightSpec: potential must have even degree >= 2 and positive leading coefficient");
    }
  }

  bool half_line() const {
    return family == WeightFamily::laguerre_half || family == WeightFamily::laguerre_minus_half;
  }

  /// Exponent a of y^a in the Laguerre weights.
  double laguerre_exponent() const {
    if (family == WeightFamily::laguerre_half) return 0.5;
    if (family == WeightFamily::laguerre_minus_half) return -0.5;
    throw std::logic_error("WeightSpec: not a Laguerre family");
  }

  /// V(x) such that w = exp(-N V) on the real-line families; y on Laguerre.
  double potential_value(double x) const {
    switch (family) {
      case WeightFamily::gaussian: return 0.5 * x * x;
      case WeightFamily::general_potential: {
        double v = 0.0;
        for (std::size_t k = potential.size(); k-- > 0;) v = v * x + potential[k];
        return v;
      }
      default: return x;
    }
  }

  double potential_derivative(double x) const {
    switch (family) {
      case WeightFamily::gaussian: return x;
      case WeightFamily::general_potential: {
        double v = 0.0;
        for (std::size_t k = potential.size(); k-- > 1;) v = v * x + static_cast<double>(k) * potential[k];
        return v;
      }
      default: return 1.0;
    }
  }

  /// log w(x); -inf outside the support (+inf at y = 0 for the y^{-1/2} weight).
  double log_weight(double x) const {
    if (half_line()) {
      if (x < 0.0) return -std::numeric_limits<double>::infinity();
      const double a = laguerre_exponent();
      if (x == 0.0)
        return a > 0 ? -std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::infinity();
      return a * std::log(x) - scale * x;
    }
    return -scale * potential_value(x);
  }
};

/// Gauss rule for a weight: integral f w dx ~ sum_i weights[i] f(nodes[i]).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Monic polynomials p_{n+1}(x) = (x - alpha_n) p_n(x) - beta_n p_{n-1}(x)
/// with norms h_n = integral p_n^2 w. beta_0 is h_0 by convention.
class MonicBasis {
 public:
  MonicBasis(WeightSpec weight, std::vector<double> alpha, std::vector<double> beta,
             std::vector<double> log_h)
      : weight_(std::move(weight)), alpha_(std::move(alpha)), beta_(std::move(beta)),
        log_h_(std::move(log_h)) {
    if (alpha_.empty() || alpha_.size() != beta_.size() || alpha_.size() != log_h_.size())
      throw std::invalid_argument("MonicBasis: inconsistent coefficient lengths");
  }

  const WeightSpec& weight() const { return weight_; }
  int max_degree() const { return static_cast<int>(alpha_.size()) - 1; }

  double alpha(int n) const { return alpha_.at(static_cast<std::size_t>(n)); }
  double beta(int n) const { return beta_.at(static_cast<std::size_t>(n)); }
  double log_norm(int n) const { return log_h_.at(static_cast<std::size_t>(n)); }

  std::span<const double> alphas() const { return alpha_; }
  std::span<const double> betas() const { return beta_; }
  std::span<const double> log_norms() const { return log_h_; }

  /// Half-width of the discretization interval (general potentials only).
  std::optional<double> support_cutoff() const { return support_cutoff_; }
  std::size_t quadrature_nodes() const { return quadrature_nodes_; }

  void set_discretization(double cutoff, std::size_t nodes) {
    support_cutoff_ = cutoff;
    quadrature_nodes_ = nodes;
  }

 private:
  WeightSpec weight_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> log_h_;
  std::optional<double> support_cutoff_;
  std::size_t quadrature_nodes_ = 0;
};

struct StieltjesOptions {
  double weight_tail = 1e-18;
  // Minimum number of nodes per unit of max_degree.
  int nodes_per_degree = 40;
  double coefficient_rtol = 1e-11;
  double orthogonality_rtol = 1e-8;
  int max_refinements = 6;
};

namespace detail {

inline void check_degree(const MonicBasis& b, int n) {
  if (n < 0 || n > b.max_degree())
    throw std::out_of_range("polynomial degree " + std::to_string(n) + " outside basis range [0, " +
                            std::to_string(b.max_degree()) + "]");
}

// Keeps a group of doubles in range by moving powers of two into a log scale.
struct Rescaler {
  double log_scale = 0.0;

  template <class Range>
  void renormalize(Range& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    if (m == 0.0 || (m < 1e150 && m > 1e-150)) return;
    int e = 0;
    std::frexp(m, &e);
    for (double& v : values) v = std::ldexp(v, -e);
    log_scale += e * std::numbers::ln2;
  }
};

inline MonicBasis gaussian_basis(const WeightSpec& w, int max_degree) {
  const double n_scale = w.scale;
  std::vector<double> alpha(max_degree + 1, 0.0), beta(max_degree + 1), log_h(max_degree + 1);
  for (int n = 0; n <= max_degree; ++n) {
    beta[n] = n / n_scale;
    log_h[n] = std::lgamma(n + 1.0) - n * std::log(n_scale) +
               0.5 * std::log(2.0 * std::numbers::pi / n_scale);
  }
  beta[0] = std::exp(log_h[0]);
  return MonicBasis(w, std::move(alpha), std::move(beta), std::move(log_h));
}

inline MonicBasis laguerre_basis(const WeightSpec& w, int max_degree) {
  const double n_scale = w.scale;
  const double a = w.laguerre_exponent();
  std::vector<double> alpha(max_degree + 1), beta(max_degree + 1), log_h(max_degree + 1);
  for (int n = 0; n <= max_degree; ++n) {
    alpha[n] = (2.0 * n + a + 1.0) / n_scale;
    beta[n] = n * (n + a) / (n_scale * n_scale);
    // h_n = n! Gamma(n + a + 1) / N^{2n + a + 1}
    log_h[n] = std::lgamma(n + 1.0) + std::lgamma(n + a + 1.0) - (2.0 * n + a + 1.0) * std::log(n_scale);
  }
  beta[0] = std::exp(log_h[0]);
  return MonicBasis(w, std::move(alpha), std::move(beta), std::move(log_h));
}

// h_n = beta_n h_{n-1}, to the given relative tolerance.
inline void check_norm_consistency(const MonicBasis& b, double rtol) {
  for (int n = 1; n <= b.max_degree(); ++n) {
    const double lhs = b.log_norm(n);
    const double rhs = b.log_norm(n - 1) + std::log(b.beta(n));
    if (std::abs(std::expm1(lhs - rhs)) > rtol)
      throw std::logic_error("MonicBasis: h_n != beta_n h_{n-1} at n = " + std::to_string(n));
  }
}

struct Discretization {
  std::vector<double> nodes;
  std::vector<double> weights;  // include exp(-N (V - V_min))
  double v_min = 0.0;
};

// Composite 20-point Gauss-Legendre rule on [-L, L].
inline Discretization discretize(const WeightSpec& w, double half_width, int panels) {
  using boost::math::quadrature::gauss;
  const auto& absc = gauss<double, 20>::abscissa();
  const auto& wts = gauss<double, 20>::weights();
  std::vector<double> ref_nodes, ref_weights;
  for (std::size_t i = 0; i < absc.size(); ++i) {
    ref_nodes.push_back(absc[i]);
    ref_weights.push_back(wts[i]);
    if (absc[i] != 0.0) {
      ref_nodes.push_back(-absc[i]);
      ref_weights.push_back(wts[i]);
    }
  }
  Discretization d;
  const double width = 2.0 * half_width / panels;
  d.nodes.reserve(static_cast<std::size_t>(panels) * ref_nodes.size());
  std::vector<double> v;
  for (int p = 0; p < panels; ++p) {
    const double mid = -half_width + (p + 0.5) * width;
    for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
      const double x = mid + 0.5 * width * ref_nodes[i];
      d.nodes.push_back(x);
      d.weights.push_back(0.5 * width * ref_weights[i]);
      v.push_back(w.potential_value(x));
    }
  }
  d.v_min = *std::min_element(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) d.weights[i] *= std::exp(-w.scale * (v[i] - d.v_min));
  return d;
}

struct StieltjesRun {
  std::vector<double> alpha, beta;
  double log_h0 = 0.0;
  double boundary_amplitude = 0.0;  // max_n |phi_n(+-L)| of the orthonormal functions
  double orthogonality_error = 0.0;
};

inline StieltjesRun stieltjes(const Discretization& d, int max_degree, double n_scale, bool check_orthogonality) {
  const std::size_t m = d.nodes.size();
  StieltjesRun run;
  run.alpha.assign(max_degree + 1, 0.0);
  run.beta.assign(max_degree + 1, 0.0);
  double s0 = 0.0;
  for (double wi : d.weights) s0 += wi;
  if (!(s0 > 0.0)) throw StieltjesBreakdown("Stieltjes: weight integrates to zero on the grid");
  run.log_h0 = std::log(s0) - n_scale * d.v_min;

  std::vector<double> q_prev(m, 0.0), q(m, 1.0 / std::sqrt(s0)), r(m);
  std::vector<std::vector<double>> history;
  if (check_orthogonality) history.push_back(q);
  double sqrt_beta = 0.0;
  for (int k = 0; k <= max_degree; ++k) {
    double a = 0.0;
    for (std::size_t i = 0; i < m; ++i) a += d.weights[i] * d.nodes[i] * q[i] * q[i];
    run.alpha[k] = a;
    if (k == max_degree) break;
    double b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      r[i] = (d.nodes[i] - a) * q[i] - sqrt_beta * q_prev[i];
      b += d.weights[i] * r[i] * r[i];
    }
    if (!(b > 0.0))
      throw StieltjesBreakdown("Stieltjes: beta_" + std::to_string(k + 1) +
                               " <= 0; quadrature resolution insufficient");
    run.beta[k + 1] = b;
    sqrt_beta = std::sqrt(b);
    q_prev.swap(q);
    for (std::size_t i = 0; i < m; ++i) q[i] = r[i] / sqrt_beta;
    if (check_orthogonality) history.push_back(q);
  }
  run.beta[0] = std::exp(run.log_h0);

  if (check_orthogonality) {
    double worst = 0.0;
    for (std::size_t a = 0; a < history.size(); ++a)
      for (std::size_t b = a; b < history.size(); ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += d.weights[i] * history[a][i] * history[b][i];
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    run.orthogonality_error = worst;
  }
  return run;
}

// Max over n <= max_degree of |phi_n(x)| with phi_n = sqrt(w / h_n) p_n, using
// the coefficients of a Stieltjes run (weights relative to exp(-N V_min)).
inline double orthonormal_amplitude(const StieltjesRun& run, const WeightSpec& w, double v_min, double x) {
  double prev = 0.0, cur = 1.0;
  Rescaler sc;
  // phi_0 = sqrt(w / h_0), with log h_0 = log s_0 - N V_min.
  sc.log_scale = -0.5 * w.scale * (w.potential_value(x) - v_min) - 0.5 * (run.log_h0 + w.scale * v_min);
  double worst = std::exp(sc.log_scale);
  const int deg = static_cast<int>(run.alpha.size()) - 1;
  for (int n = 0; n < deg; ++n) {
    const double sb = n == 0 ? 0.0 : std::sqrt(run.beta[n]);
    const double next = ((x - run.alpha[n]) * cur - sb * prev) / std::sqrt(run.beta[n + 1]);
    prev = cur;
    cur = next;
    std::array<double, 2> pair{prev, cur};
    sc.renormalize(pair);
    prev = pair[0];
    cur = pair[1];
    worst = std::max(worst, std::abs(cur) * std::exp(sc.log_scale));
  }
  return worst;
}

inline double initial_support(const WeightSpec& w, double tail) {
  const double target = -std::log(tail);
  double v_min = w.potential_value(0.0);
  const double step = 1e-3;
  for (int k = 1; k < 10'000'000; ++k) {
    const double x = k * step;
    const double vp = w.potential_value(x), vm = w.potential_value(-x);
    v_min = std::min({v_min, vp, vm});
    if (w.scale * (vp - v_min) >= target && w.scale * (vm - v_min) >= target &&
        w.potential_derivative(x) > 0.0 && w.potential_derivative(-x) < 0.0)
      return x;
  }
  throw std::invalid_argument("WeightSpec: weight is not normalizable");
}

inline MonicBasis stieltjes_basis(const WeightSpec& w, int max_degree, const StieltjesOptions& opt) {
  double half_width = initial_support(w, opt.weight_tail);
  // Enlarge the interval until every orthonormal function up to max_degree has
  // decayed at the boundary.
  const int min_nodes = std::max(opt.nodes_per_degree * std::max(max_degree, 1), 200);
  const int base_panels = (min_nodes + 19) / 20;
  for (int widen = 0; widen < 20; ++widen) {
    Discretization coarse = discretize(w, half_width, base_panels);
    StieltjesRun probe = stieltjes(coarse, max_degree, w.scale, false);
    const double edge = std::max(orthonormal_amplitude(probe, w, coarse.v_min, half_width),
                                 orthonormal_amplitude(probe, w, coarse.v_min, -half_width));
    if (edge * edge * half_width > opt.weight_tail) {
      half_width *= 1.2;
      continue;
    }
    // Refine the panels until the coefficients stop moving.
    int panels = base_panels;
    StieltjesRun prev = std::move(probe);
    for (int refine = 0; refine < opt.max_refinements; ++refine) {
      panels *= 2;
      Discretization fine = discretize(w, half_width, panels);
      StieltjesRun next = stieltjes(fine, max_degree, w.scale, false);
      double change = 0.0;
      for (int n = 0; n <= max_degree; ++n) {
        const double scale_n = std::abs(next.alpha[n]) + std::sqrt(std::max(next.beta[std::max(n, 1)], 0.0)) + 1e-300;
        change = std::max(change, std::abs(next.alpha[n] - prev.alpha[n]) / scale_n);
        if (n >= 1) change = std::max(change, std::abs(next.beta[n] / prev.beta[n] - 1.0));
      }
      change = std::max(change, std::abs(next.log_h0 - prev.log_h0));
      prev = std::move(next);
      if (change < opt.coefficient_rtol) {
        StieltjesRun checked = stieltjes(fine, max_degree, w.scale, true);
        if (checked.orthogonality_error > opt.orthogonality_rtol)
          throw StieltjesBreakdown("Stieltjes: orthogonality lost (error " +
                                   std::to_string(checked.orthogonality_error) + ")");
        std::vector<double> log_h(max_degree + 1);
        log_h[0] = checked.log_h0;
        for (int n = 1; n <= max_degree; ++n) log_h[n] = log_h[n - 1] + std::log(checked.beta[n]);
        MonicBasis basis(w, std::move(checked.alpha), std::move(checked.beta), std::move(log_h));
        basis.set_discretization(half_width, fine.nodes.size());
        return basis;
      }
    }
    throw StieltjesBreakdown("Stieltjes: recurrence coefficients did not converge under refinement");
  }
  throw StieltjesBreakdown("Stieltjes: could not find a support interval");
}

}  // namespace detail

/// Builds the monic basis up to max_degree. Gaussian and Laguerre weights use
/// their closed-form recurrences (norms cross-checked against the closed-form
/// h_n); general potentials go through a discretized Stieltjes procedure.
inline MonicBasis build_basis(const WeightSpec& weight, int max_degree,
                              const StieltjesOptions& options = {}) {
  weight.validate();
  if (max_degree < 0) throw std::invalid_argument("build_basis: max_degree must be >= 0");
  switch (weight.family) {
    case WeightFamily::gaussian: {
      auto b = detail::gaussian_basis(weight, max_degree);
      detail::check_norm_consistency(b, 1e-10);
      return b;
    }
    case WeightFamily::laguerre_half:
    case WeightFamily::laguerre_minus_half: {
      auto b = detail::laguerre_basis(weight, max_degree);
      detail::check_norm_consistency(b, 1e-10);
      return b;
    }
    case WeightFamily::general_potential:
      return detail::stieltjes_basis(weight, max_degree, options);
  }
  throw std::logic_error("build_basis: unknown family");
}

/// Table of p_n^{(k)}(x) for n in [n_lo, n_hi] and k <= order (row n - n_lo).
inline std::vector<std::vector<ScaledValue>> derivative_table(const MonicBasis& basis, double x, int n_lo,
                                                              int n_hi, int order) {
  detail::check_degree(basis, n_lo);
  detail::check_degree(basis, n_hi);
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (n_lo > n_hi) throw std::invalid_argument("derivative_table: empty degree range");
  const auto width = static_cast<std::size_t>(order) + 1;
  std::vector<double> prev(width, 0.0), cur(width, 0.0), next(width);
  cur[0] = 1.0;
  detail::Rescaler sc;
  std::vector<std::vector<ScaledValue>> rows;
  rows.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  auto emit = [&] {
    std::vector<ScaledValue> row(width);
    for (std::size_t k = 0; k < width; ++k)
      row[k] = ScaledValue(cur[k]) * ScaledValue::from_log(sc.log_scale);
    rows.push_back(std::move(row));
  };
  if (n_lo == 0) emit();
  for (int n = 0; n < n_hi; ++n) {
    const double a = basis.alpha(n);
    const double b = n == 0 ? 0.0 : basis.beta(n);
    for (std::size_t k = 0; k < width; ++k)
      next[k] = (x - a) * cur[k] + (k > 0 ? static_cast<double>(k) * cur[k - 1] : 0.0) - b * prev[k];
    prev.swap(cur);
    cur.swap(next);
    // prev and cur share one scale.
    std::vector<double> both(prev);
    both.insert(both.end(), cur.begin(), cur.end());
    sc.renormalize(both);
    std::copy(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(width), prev.begin());
    std::copy(both.begin() + static_cast<std::ptrdiff_t>(width), both.end(), cur.begin());
    if (n + 1 >= n_lo) emit();
  }
  return rows;
}

/// p_n(x) by forward recurrence.
inline ScaledValue eval_poly(const MonicBasis& basis, int n, double x) {
  return derivative_table(basis, x, n, n, 0).front().front();
}

/// (p_n(x), p_n'(x), ..., p_n^{(order)}(x)).
inline std::vector<ScaledValue> eval_poly_derivatives(const MonicBasis& basis, int n, double x, int order) {
  return derivative_table(basis, x, n, n, order).front();
}

/// phi_n(x) = sqrt(w(x) / h_n) p_n(x) for n < count.
inline std::vector<ScaledValue> orthonormal_functions(const MonicBasis& basis, int count, double x) {
  if (count < 0 || count > basis.max_degree() + 1)
    throw std::out_of_range("orthonormal_functions: count outside basis range");
  std::vector<ScaledValue> out;
  out.reserve(static_cast<std::size_t>(count));
  const double lw = basis.weight().log_weight(x);
  if (count == 0 || lw == -std::numeric_limits<double>::infinity()) {
    out.assign(static_cast<std::size_t>(count), ScaledValue{});
    return out;
  }
  detail::Rescaler sc;
  sc.log_scale = 0.5 * lw - 0.5 * basis.log_norm(0);
  double prev = 0.0, cur = 1.0;
  out.push_back(ScaledValue::from_log(sc.log_scale));
  for (int n = 0; n + 1 < count; ++n) {
    const double sb = n == 0 ? 0.0 : std::sqrt(basis.beta(n));
    const double next = ((x - basis.alpha(n)) * cur - sb * prev) / std::sqrt(basis.beta(n + 1));
    prev = cur;
    cur = next;
    std::array<double, 2> pair{prev, cur};
    sc.renormalize(pair);
    prev = pair[0];
    cur = pair[1];
    out.push_back(ScaledValue(cur) * ScaledValue::from_log(sc.log_scale));
  }
  return out;
}

/// K_M(x, y) = sqrt(w(x) w(y)) sum_{n<M} p_n(x) p_n(y) / h_n.
inline ScaledValue cd_kernel_scaled(const MonicBasis& basis, int m, double x, double y) {
  if (m < 0 || m > basis.max_degree() + 1)
    throw std::out_of_range("cd_kernel: M = " + std::to_string(m) + " outside basis range");
  const auto fx = orthonormal_functions(basis, m, x);
  const auto fy = x == y ? fx : orthonormal_functions(basis, m, y);
  ScaledValue sum;
  for (int n = 0; n < m; ++n) sum += fx[n] * fy[n];
  return sum;
}

inline double cd_kernel(const MonicBasis& basis, int m, double x, double y) {
  return cd_kernel_scaled(basis, m, x, y).to_double();
}

/// n-point Gauss rule of the basis weight (Golub-Welsch).
inline GaussRule gauss_rule(const MonicBasis& basis, int n) {
  if (n < 1 || n > basis.max_degree() + 1) throw std::out_of_range("gauss_rule: size outside basis range");
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) diag[i] = basis.alpha(i);
  for (int i = 0; i + 1 < n; ++i) sub[i] = std::sqrt(basis.beta(i + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("gauss_rule: eigen decomposition failed");
  GaussRule rule;
  const double h0 = std::exp(basis.log_norm(0));
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()[i]);
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(h0 * v * v);
  }
  return rule;
}

inline nlohmann::json to_json(const MonicBasis& basis) {
  nlohmann::json j;
  j["family"] = to_string(basis.weight().family);
  j["N"] = basis.weight().scale;
  if (!basis.weight().potential.empty()) j["potential"] = basis.weight().potential;
  j["alpha"] = std::vector<double>(basis.alphas().begin(), basis.alphas().end());
  j["beta"] = std::vector<double>(basis.betas().begin(), basis.betas().end());
  j["log_h"] = std::vector<double>(basis.log_norms().begin(), basis.log_norms().end());
  if (basis.support_cutoff()) {
    j["support_cutoff"] = *basis.support_cutoff();
    j["support_cutoff_heuristic"] = true;
    j["quadrature_nodes"] = basis.quadrature_nodes();
  }
  return j;
}

}  // namespace cpm
