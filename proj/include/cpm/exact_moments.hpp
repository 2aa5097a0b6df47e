#pragma once

// Exact finite-N averages of products of characteristic polynomials,
//   F_K(l_1..l_K) = < prod_a det(l_a - X) >,
// as ratios of determinants of monic orthogonal polynomials, with confluent
// (coinciding-argument) limits, the normalized moments Phi_{2K} and M_{2K},
// and the bridge to the K-point correlation function R_K.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cpm/errors.hpp"
#include "cpm/linalg.hpp"
#include "cpm/orthopoly.hpp"
#include "cpm/scaled_value.hpp"

namespace cpm {

enum class EnsembleClass {
  unitary_gaussian,
  unitary_general,
  symplectic,       // Sp-type: eigenvalues in pairs +-x, weight x^2 in y = x^2
  orthogonal_even,  // O(2N)-type: eigenvalues in pairs +-x
};

inline std::string to_string(EnsembleClass c) {
  switch (c) {
    case EnsembleClass::unitary_gaussian: return "unitary-gaussian";
    case EnsembleClass::unitary_general: return "unitary-general";
    case EnsembleClass::symplectic: return "symplectic";
    case EnsembleClass::orthogonal_even: return "orthogonal-even";
  }
  return "unknown";
}

struct Ensemble {
  EnsembleClass cls = EnsembleClass::unitary_gaussian;
  int M = 1;  // number of independent eigenvalues
  WeightSpec weight = WeightSpec::gaussian(1.0);

  static Ensemble gue(int m, double n) { return {EnsembleClass::unitary_gaussian, m, WeightSpec::gaussian(n)}; }
  static Ensemble unitary(int m, WeightSpec w) {
    const auto cls = w.family == WeightFamily::gaussian ? EnsembleClass::unitary_gaussian
                                                        : EnsembleClass::unitary_general;
    return {cls, m, std::move(w)};
  }
  static Ensemble symplectic(int m, double n) {
    return {EnsembleClass::symplectic, m, WeightSpec::laguerre_half(n)};
  }
  static Ensemble orthogonal(int m, double n) {
    return {EnsembleClass::orthogonal_even, m, WeightSpec::laguerre_minus_half(n)};
  }

  double N() const { return weight.scale; }
  /// Symplectic and orthogonal classes act on mu = lambda^2.
  bool paired() const { return cls == EnsembleClass::symplectic || cls == EnsembleClass::orthogonal_even; }

  void validate() const {
    if (M < 1) throw std::invalid_argument("Ensemble: M must be >= 1");
    weight.validate();
    const bool laguerre = weight.half_line();
    if (paired() != laguerre)
      throw std::invalid_argument("Ensemble: class " + to_string(cls) + " does not match weight family " +
                                  to_string(weight.family));
    if (cls == EnsembleClass::symplectic && weight.family != WeightFamily::laguerre_half)
      throw std::invalid_argument("Ensemble: symplectic class needs the y^{1/2} weight");
    if (cls == EnsembleClass::orthogonal_even && weight.family != WeightFamily::laguerre_minus_half)
      throw std::invalid_argument("Ensemble: orthogonal class needs the y^{-1/2} weight");
  }

  /// Integer N for operations that tie M to N - K.
  int integer_N() const {
    const double n = N();
    if (n != std::round(n) || n < 1) throw std::invalid_argument("Ensemble: N must be a positive integer here");
    return static_cast<int>(n);
  }
};

struct MomentQuery {
  std::vector<std::pair<double, int>> points;  // (lambda, multiplicity)

  static MomentQuery equal(double lambda, int k) { return {{{lambda, k}}}; }
  static MomentQuery paired(std::span<const double> lambdas) {
    MomentQuery q;
    for (double l : lambdas) q.points.emplace_back(l, 2);
    return q;
  }

  int total() const {
    int k = 0;
    for (const auto& p : points) k += p.second;
    return k;
  }

  void validate() const {
    if (points.empty()) throw std::invalid_argument("MomentQuery: no points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].second < 1) throw std::invalid_argument("MomentQuery: multiplicity must be >= 1");
      for (std::size_t j = 0; j < i; ++j)
        if (points[i].first == points[j].first) throw std::invalid_argument("MomentQuery: repeated point");
    }
  }
};

enum class Normalization { raw_f, weighted_phi, universal_m, normalized_origin };

inline std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::raw_f: return "raw-F";
    case Normalization::weighted_phi: return "weighted-Phi";
    case Normalization::universal_m: return "universal-M";
    case Normalization::normalized_origin: return "normalized-origin";
  }
  return "unknown";
}

struct ExactResult {
  ScaledValue value;
  int K_total = 0;
  Ensemble ensemble;
  Normalization normalization = Normalization::raw_f;
  std::vector<double> lambdas;
  // Sign of the unnormalized determinant where only the magnitude is returned.
  int computed_phase = 1;
};

namespace detail {

struct MergedPoint {
  double u;
  int multiplicity;
};

// lambda -> u (u = lambda^2 for paired classes); points that coincide in u merge.
inline std::vector<MergedPoint> merge_points(const Ensemble& e, const MomentQuery& q) {
  std::vector<MergedPoint> out;
  for (const auto& [lambda, m] : q.points) {
    const double u = e.paired() ? lambda * lambda : lambda;
    bool merged = false;
    for (auto& p : out)
      if (p.u == u) {
        p.multiplicity += m;
        merged = true;
      }
    if (!merged) out.push_back({u, m});
  }
  return out;
}

inline ScaledValue confluent_ratio(const MonicBasis& basis, int m, const std::vector<MergedPoint>& pts) {
  int k = 0;
  for (const auto& p : pts) k += p.multiplicity;
  if (m + k - 1 > basis.max_degree())
    throw std::out_of_range("F_K needs degree " + std::to_string(m + k - 1) + " but basis stops at " +
                            std::to_string(basis.max_degree()));
  ScaledMatrix a;
  a.reserve(static_cast<std::size_t>(k));
  for (const auto& p : pts) {
    const auto table = derivative_table(basis, p.u, m, m + k - 1, p.multiplicity - 1);
    for (int r = 0; r < p.multiplicity; ++r) {
      const auto inv_fact = ScaledValue::from_log(-std::lgamma(r + 1.0));
      std::vector<ScaledValue> row(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) row[j] = table[j][r] * inv_fact;
      a.push_back(std::move(row));
    }
  }
  ScaledValue det = scaled_determinant(a);
  // Confluent Vandermonde prod_{i<j} (u_j - u_i)^{m_i m_j}.
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      det /= ScaledValue(pts[j].u - pts[i].u).pow(pts[i].multiplicity * pts[j].multiplicity);
  return det;
}

inline std::vector<double> query_lambdas(const MomentQuery& q) {
  std::vector<double> out;
  for (const auto& [l, m] : q.points)
    for (int r = 0; r < m; ++r) out.push_back(l);
  return out;
}

// 1 / prod_{n=N-K}^{N-1} h_n
inline ScaledValue inverse_norm_product(const MonicBasis& basis, int n, int k) {
  double s = 0.0;
  for (int j = n - k; j < n; ++j) s += basis.log_norm(j);
  return ScaledValue::from_log(-s);
}

inline void require_unitary(const Ensemble& e, const char* op) {
  if (e.paired()) throw std::invalid_argument(std::string(op) + " is defined for unitary classes only");
}

inline void require_moment_size(const Ensemble& e, int k, const char* op) {
  const int n = e.integer_N();
  if (e.M != n - k)
    throw std::invalid_argument(std::string(op) + ": needs M = N - K (M = " + std::to_string(e.M) +
                                ", N = " + std::to_string(n) + ", K = " + std::to_string(k) + ")");
}

}  // namespace detail

/// F_K for a query with multiplicities (rows of derivatives p^{(r)}/r! at each
/// repeated point, divided by the confluent Vandermonde).
inline ExactResult fk_confluent(const Ensemble& e, const MomentQuery& q, const MonicBasis& basis) {
  e.validate();
  q.validate();
  ExactResult r;
  r.value = detail::confluent_ratio(basis, e.M, detail::merge_points(e, q));
  r.K_total = q.total();
  r.ensemble = e;
  r.normalization = Normalization::raw_f;
  r.lambdas = detail::query_lambdas(q);
  r.computed_phase = r.value.sign();
  return r;
}

inline ExactResult fk_confluent(const Ensemble& e, const MomentQuery& q) {
  e.validate();
  q.validate();
  return fk_confluent(e, q, build_basis(e.weight, e.M + q.total() - 1));
}

/// F_K(l_1..l_K) = det[p_{M+j}(u_i)] / prod_{i<j}(u_j - u_i) for distinct u.
inline ExactResult fk_distinct(const Ensemble& e, std::span<const double> lambdas, const MonicBasis& basis) {
  if (lambdas.empty()) throw std::invalid_argument("fk_distinct: no points");
  MomentQuery q;
  for (double l : lambdas) q.points.emplace_back(l, 1);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const bool same = e.paired() ? lambdas[i] * lambdas[i] == lambdas[j] * lambdas[j] : lambdas[i] == lambdas[j];
      if (same) throw std::invalid_argument("fk_distinct: coincident points; use fk_confluent");
    }
  return fk_confluent(e, q, basis);
}

inline ExactResult fk_distinct(const Ensemble& e, std::span<const double> lambdas) {
  e.validate();
  return fk_distinct(e, lambdas, build_basis(e.weight, e.M + static_cast<int>(lambdas.size()) - 1));
}

/// Phi_{2K} = (1 / prod_{n=N-K}^{N-1} h_n) exp(-(N/2) sum V(l)) F_{2K}, with M = N - K.
inline ExactResult weighted_phi(const Ensemble& e, const MomentQuery& q, const MonicBasis& basis) {
  detail::require_unitary(e, "weighted_phi");
  const int total = q.total();
  if (total % 2 != 0) throw std::invalid_argument("weighted_phi: needs an even number of points");
  const int k = total / 2;
  detail::require_moment_size(e, k, "weighted_phi");
  ExactResult r = fk_confluent(e, q, basis);
  ScaledValue v = r.value * detail::inverse_norm_product(basis, e.integer_N(), k);
  for (const auto& [l, m] : q.points) v *= ScaledValue::from_log(0.5 * m * e.weight.log_weight(l));
  r.value = v;
  r.normalization = Normalization::weighted_phi;
  return r;
}

inline ExactResult weighted_phi(const Ensemble& e, const MomentQuery& q) {
  e.validate();
  return weighted_phi(e, q, build_basis(e.weight, e.integer_N() + q.total() / 2));
}

/// M_{2K}(l) = w(l)^K F_{2K}(l..l) / prod_{n=N-K}^{N-1} h_n, with M = N - K.
inline ExactResult universal_moment(const Ensemble& e, double lambda, int k, const MonicBasis& basis) {
  if (k < 1) throw std::invalid_argument("universal_moment: K must be >= 1");
  auto r = weighted_phi(e, MomentQuery::equal(lambda, 2 * k), basis);
  r.normalization = Normalization::universal_m;
  return r;
}

inline ExactResult universal_moment(const Ensemble& e, double lambda, int k) {
  e.validate();
  if (k < 1) throw std::invalid_argument("universal_moment: K must be >= 1");
  detail::require_unitary(e, "universal_moment");
  detail::require_moment_size(e, k, "universal_moment");
  return universal_moment(e, lambda, k, build_basis(e.weight, e.integer_N() + k));
}

struct CorrelationRoutes {
  double via_characteristic = 0.0;  // prefactor * w * Delta^2 * F_{2K}
  double via_kernel = 0.0;          // det K_N(l_i, l_j)
  double scale = 0.0;               // prod K_N(l_i, l_i)
  double mismatch = 0.0;            // |difference| / max(|via_kernel|, scale)
};

/// R_K computed from the characteristic-polynomial relation and from the
/// kernel determinant.
inline CorrelationRoutes rk_routes(const Ensemble& e, std::span<const double> lambdas, const MonicBasis& basis) {
  detail::require_unitary(e, "rk_correlation");
  const int k = static_cast<int>(lambdas.size());
  if (k < 1) throw std::invalid_argument("rk_correlation: no points");
  detail::require_moment_size(e, k, "rk_correlation");
  const int n = e.integer_N();

  CorrelationRoutes out;
  ScaledMatrix kern(static_cast<std::size_t>(k), std::vector<ScaledValue>(static_cast<std::size_t>(k)));
  ScaledValue diag = ScaledValue::one();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      kern[i][j] = cd_kernel_scaled(basis, n, lambdas[i], lambdas[j]);
      if (i == j) diag *= kern[i][j];
    }
  const ScaledValue b = scaled_determinant(kern);

  bool distinct = true;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j) distinct = distinct && lambdas[i] != lambdas[j];
  ScaledValue a;
  if (distinct) {
    a = weighted_phi(e, MomentQuery::paired(lambdas), basis).value;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) a *= ScaledValue(lambdas[i] - lambdas[j]).pow(2);
  }
  out.via_characteristic = a.to_double();
  out.via_kernel = b.to_double();
  out.scale = diag.to_double();
  const double denom = std::max(std::abs(out.via_kernel), std::abs(out.scale));
  out.mismatch = denom == 0.0 ? 0.0 : std::abs(out.via_characteristic - out.via_kernel) / denom;
  return out;
}

/// R_K(l_1..l_K) as det K_N(l_i, l_j), asserted against the characteristic
/// polynomial route.
inline double rk_correlation(const Ensemble& e, std::span<const double> lambdas, const MonicBasis& basis,
                             double rtol = 1e-6) {
  const auto routes = rk_routes(e, lambdas, basis);
  if (routes.mismatch > rtol)
    throw RouteMismatch("rk_correlation: routes disagree (relative " + std::to_string(routes.mismatch) + ")");
  return routes.via_kernel;
}

inline double rk_correlation(const Ensemble& e, std::span<const double> lambdas, double rtol = 1e-6) {
  e.validate();
  const int k = static_cast<int>(lambdas.size());
  detail::require_unitary(e, "rk_correlation");
  detail::require_moment_size(e, k, "rk_correlation");
  return rk_correlation(e, lambdas, build_basis(e.weight, e.integer_N() + k), rtol);
}

/// |F_K(0..0)| (2 pi)^{-K/2} e^{KN} for the symplectic or orthogonal class with
/// M = N - K. The sign of the determinant is kept in computed_phase.
inline ExactResult sp_o_moment_at_zero(EnsembleClass cls, int n, int k) {
  if (cls != EnsembleClass::symplectic && cls != EnsembleClass::orthogonal_even)
    throw std::invalid_argument("sp_o_moment_at_zero: class must be symplectic or orthogonal-even");
  if (k < 0) throw std::invalid_argument("sp_o_moment_at_zero: K must be >= 0");
  if (n < 1) throw std::invalid_argument("sp_o_moment_at_zero: N must be >= 1");
  ExactResult r;
  r.K_total = k;
  r.normalization = Normalization::normalized_origin;
  if (k == 0) {
    r.value = ScaledValue::one();
    r.ensemble = cls == EnsembleClass::symplectic ? Ensemble::symplectic(n, n) : Ensemble::orthogonal(n, n);
    return r;
  }
  if (n - k < 1) throw std::invalid_argument("sp_o_moment_at_zero: needs N > K");
  const Ensemble e = cls == EnsembleClass::symplectic ? Ensemble::symplectic(n - k, n) : Ensemble::orthogonal(n - k, n);
  auto f = fk_confluent(e, MomentQuery::equal(0.0, k));
  r.ensemble = e;
  r.lambdas = f.lambdas;
  r.computed_phase = f.value.sign();
  r.value = f.value.abs() *
            ScaledValue::from_log(-0.5 * k * std::log(2.0 * std::numbers::pi) + static_cast<double>(k) * n);
  return r;
}

inline nlohmann::json to_json(const Ensemble& e) {
  nlohmann::json j{{"class", to_string(e.cls)}, {"M", e.M}, {"N", e.N()}, {"family", to_string(e.weight.family)}};
  if (!e.weight.potential.empty()) j["potential"] = e.weight.potential;
  return j;
}

inline nlohmann::json to_json(const ExactResult& r) {
  const auto ph = r.value.phase();
  return {{"ensemble", to_json(r.ensemble)},
          {"lambdas", r.lambdas},
          {"K", r.K_total},
          {"log_magnitude", r.value.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(r.value.log_magnitude())},
          {"phase", {ph.real(), ph.imag()}},
          {"computed_phase", r.computed_phase},
          {"normalization", to_string(r.normalization)}};
}

}  // namespace cpm
