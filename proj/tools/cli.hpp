#pragma once

// The cpm command line: exact, universality, mc, zeta and constants. Kept in
// a header so the tests can drive run_cli without spawning processes.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/errors.hpp"
#include "cpm/exact_moments.hpp"
#include "cpm/montecarlo.hpp"
#include "cpm/numbertheory.hpp"
#include "cpm/orthopoly.hpp"
#include "cpm/version.hpp"

namespace cpm::cli {

enum ExitCode { ok = 0, usage = 2, numerical = 3, gate_failed = 4 };

using ordered_json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string command;
  ordered_json parameters = ordered_json::object();
  ordered_json tolerances = ordered_json::object();
  ordered_json summary;  // optional command-level result (e.g. the gate)
  Table table;
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<std::string>(c)) {
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return "";
}

inline ordered_json json_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    return std::isfinite(v) ? ordered_json(v) : ordered_json(format_double(v));
  }
  if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

inline ordered_json metadata(const Report& r) {
  ordered_json m;
  m["tool"] = "cpm";
  m["version"] = cpm::version;
  m["command"] = r.command;
  m["parameters"] = r.parameters;
  m["tolerances"] = r.tolerances;
  m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION}};
  return m;
}

inline void write_report(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    ordered_json j;
    j["metadata"] = metadata(r);
    if (!r.summary.is_null()) j["summary"] = r.summary;
    j["columns"] = r.table.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.table.rows) {
      ordered_json o;
      for (std::size_t i = 0; i < row.size(); ++i) o[r.table.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
    return;
  }
  out << "# metadata " << metadata(r).dump() << "\n";
  if (!r.summary.is_null()) out << "# summary " << r.summary.dump() << "\n";
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) out << (i ? "," : "") << r.table.columns[i];
  out << "\n";
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << "\n";
  }
}

inline int default_workers() {
  if (const char* env = std::getenv("CPM_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

// Options shared by the subcommands that pick an ensemble.
struct EnsembleArgs {
  std::string name = "gue";
  double N = 0.0;
  double g = 0.1;
  std::vector<double> potential;

  void add(CLI::App* app) {
    app->add_option("--ensemble", name, "gue, quartic, general, sp or o")
        ->check(CLI::IsMember({"gue", "quartic", "general", "sp", "o"}))
        ->capture_default_str();
    app->add_option("--g", g, "quartic coefficient of V = x^2/2 + g x^4")->capture_default_str();
    app->add_option("--potential", potential, "coefficients c0,c1,... of V (general)")->delimiter(',');
  }

  Ensemble make(int m) const {
    if (name == "gue") return Ensemble::gue(m, N);
    if (name == "quartic") return Ensemble::unitary(m, WeightSpec::quartic(N, g));
    if (name == "general") return Ensemble::unitary(m, WeightSpec::general(N, potential));
    if (name == "sp") return Ensemble::symplectic(m, N);
    return Ensemble::orthogonal(m, N);
  }
};

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

inline MomentQuery group_points(const std::vector<double>& lambdas) {
  MomentQuery q;
  for (double l : lambdas) {
    bool found = false;
    for (auto& p : q.points)
      if (p.first == l) {
        ++p.second;
        found = true;
      }
    if (!found) q.points.emplace_back(l, 1);
  }
  return q;
}

inline std::vector<double> parse_grid(const std::string& text) {
  double a = 0.0, b = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
    throw std::invalid_argument("--grid expects start:stop:count");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return g;
}

inline Cell scaled_cell(const ScaledValue& v) {
  const double d = v.to_double();
  return std::isfinite(d) ? Cell(d) : Cell();
}

inline Cell log_cell(const ScaledValue& v) { return v.is_zero() ? Cell() : Cell(v.log_magnitude()); }

struct ExactArgs {
  EnsembleArgs ens;
  int M = -1;
  int K = 1;
  std::vector<double> lambdas{0.0};
  std::string grid;
  std::string normalization = "auto";
};

inline Report run_exact(const ExactArgs& a) {
  Report r;
  r.command = "exact";
  r.table.columns = {"ensemble", "N", "M", "K", "lambda", "normalization", "value", "value_log", "sign",
                     "prediction", "prediction_log", "ratio"};
  if (a.K < 1) throw std::invalid_argument("exact: K must be >= 1");
  const bool paired = a.ens.name == "sp" || a.ens.name == "o";
  std::vector<std::vector<double>> sets;
  if (!a.grid.empty())
    for (double l : parse_grid(a.grid)) sets.push_back({l});
  else
    sets.push_back(a.lambdas);

  for (const auto& lambdas : sets) {
    std::string norm = a.normalization;
    if (norm == "auto") {
      if (!paired)
        norm = "universal-M";
      else
        norm = (lambdas.size() == 1 && lambdas[0] == 0.0) ? "normalized-origin" : "raw-F";
    }
    const int n_int = static_cast<int>(std::lround(a.ens.N));
    ExactResult res;
    std::optional<ScaledValue> pred;
    int m = a.M;
    if (norm == "universal-M") {
      if (lambdas.size() != 1) throw std::invalid_argument("exact: universal-M takes a single --lambda");
      if (m < 0) m = n_int - a.K;
      const Ensemble e = a.ens.make(m);
      res = universal_moment(e, lambdas[0], a.K);
      double rho = 0.0;
      if (e.cls == EnsembleClass::unitary_gaussian) {
        rho = semicircle_density(lambdas[0]);
      } else {
        const auto basis = build_basis(e.weight, n_int);
        rho = cd_kernel(basis, n_int, lambdas[0], lambdas[0]) / n_int;
      }
      if (rho > 0.0) pred = m2k_prediction(a.ens.N, rho, a.K);
    } else if (norm == "weighted-Phi") {
      if (m < 0) m = n_int - a.K;
      auto q = lambdas.size() == 1 ? MomentQuery::equal(lambdas[0], 2 * a.K) : group_points(lambdas);
      if (q.total() != 2 * a.K) throw std::invalid_argument("exact: weighted-Phi needs 2K points");
      res = weighted_phi(a.ens.make(m), q);
    } else if (norm == "raw-F") {
      if (m < 0) m = n_int;
      auto q = lambdas.size() == 1 ? MomentQuery::equal(lambdas[0], a.K) : group_points(lambdas);
      if (q.total() != a.K) throw std::invalid_argument("exact: raw-F needs K points or a single --lambda");
      res = fk_confluent(a.ens.make(m), q);
    } else if (norm == "normalized-origin") {
      if (!paired) throw std::invalid_argument("exact: normalized-origin applies to sp and o");
      if (lambdas.size() != 1 || lambdas[0] != 0.0)
        throw std::invalid_argument("exact: normalized-origin is evaluated at lambda = 0");
      if (a.M >= 0 && a.M != n_int - a.K) throw std::invalid_argument("exact: normalized-origin fixes M = N - K");
      const auto cls = a.ens.name == "sp" ? EnsembleClass::symplectic : EnsembleClass::orthogonal_even;
      res = sp_o_moment_at_zero(cls, n_int, a.K);
      m = n_int - a.K;
      pred = a.ens.name == "sp" ? sp_moment_prediction(a.ens.N, a.K) : o_moment_prediction(a.ens.N, a.K);
    } else {
      throw std::invalid_argument("exact: unknown normalization " + norm);
    }
    std::vector<Cell> row{a.ens.name, a.ens.N, static_cast<long long>(m), static_cast<long long>(a.K),
                          join(lambdas), norm, scaled_cell(res.value), log_cell(res.value),
                          static_cast<long long>(res.value.sign() == 0 ? res.computed_phase : res.value.sign())};
    if (pred) {
      row.push_back(scaled_cell(*pred));
      row.push_back(log_cell(*pred));
      row.push_back(res.value.is_zero() ? Cell() : Cell(std::exp(res.value.log_magnitude() - pred->log_magnitude())));
    } else {
      row.insert(row.end(), 3, Cell());
    }
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

struct UniversalityArgs {
  double g = 0.1;
  int N = 100;
  double center = 0.0;
  double xmax = 4.0;
  int points = 80;
  std::vector<int> K{1, 2};
  double tolerance = 0.03;
};

inline Report run_universality(const UniversalityArgs& a, bool& passed) {
  Report r;
  r.command = "universality";
  r.tolerances = {{"kernel_sup_deviation", a.tolerance}};
  r.table.columns = {"kind", "x", "K", "exact", "predicted", "ratio"};
  if (a.N < 2) throw std::invalid_argument("universality: N must be >= 2");
  if (a.points < 1 || !(a.xmax > 0.0)) throw std::invalid_argument("universality: needs points >= 1 and xmax > 0");
  const WeightSpec w = a.g == 0.0 ? WeightSpec::gaussian(a.N) : WeightSpec::quartic(a.N, a.g);
  w.validate();
  int kmax = 1;
  for (int k : a.K) {
    if (k < 1 || k >= a.N) throw std::invalid_argument("universality: K out of range");
    kmax = std::max(kmax, k);
  }
  const auto basis = build_basis(w, a.N + kmax);
  std::vector<double> xs;
  for (int i = 1; i <= a.points; ++i) xs.push_back(a.xmax * i / a.points);
  const auto rep = kernel_universality(basis, a.N, a.center, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    r.table.rows.push_back({std::string("kernel"), rep.x[i], Cell(), rep.exact[i], rep.predicted[i], rep.ratio[i]});
  for (int k : a.K) {
    const auto mk = universal_moment(Ensemble::unitary(a.N - k, w), a.center, k, basis);
    const auto pk = m2k_prediction(a.N, rep.rho, k);
    r.table.rows.push_back({std::string("moment"), Cell(), static_cast<long long>(k), scaled_cell(mk.value),
                            scaled_cell(pk), std::exp(mk.value.log_magnitude() - pk.log_magnitude())});
  }
  passed = rep.sup_deviation <= a.tolerance;
  r.summary = {{"rho", rep.rho}, {"sup_deviation", rep.sup_deviation}, {"passed", passed}};
  return r;
}

struct McArgs {
  EnsembleArgs ens;
  int M = 0;
  int K = 1;
  std::vector<double> lambdas{0.0};
  double samples = 1e5;
  std::uint64_t seed = 0;
  std::string sampler = "auto";
  int workers = 1;
  int burn_in = 500;
  int thinning = 4;
  double width = 0.0;
  bool negative = false;
  double epsilon = 0.0;  // 0: 1e-4 times the semicircle width 4 sqrt(M/N)
  std::string side = "plus";
  bool exact = false;
  std::string save_samples;
  std::string load_samples;
};

inline Report run_mc(const McArgs& a, std::ostream& err) {
  Report r;
  r.command = "mc";
  r.table.columns = {"ensemble", "M", "N", "K", "lambda", "kind", "mean_re", "mean_im", "standard_error",
                     "log_scale", "samples", "seed", "acceptance", "reference_re", "reference_im", "z"};
  if (a.K < 1) throw std::invalid_argument("mc: K must be >= 1");
  if (a.samples < 1 || a.samples != std::floor(a.samples) || a.samples > 1e10)
    throw std::invalid_argument("mc: --samples must be a positive integer");

  SampleSet set;
  if (!a.load_samples.empty()) {
    set = read_samples(a.load_samples);
  } else {
    if (a.M < 1) throw std::invalid_argument("mc: --M must be >= 1");
    EnsembleArgs ens = a.ens;
    if (ens.N <= 0.0) ens.N = a.M;
    SampleConfig c;
    c.ensemble = ens.make(a.M);
    c.samples = static_cast<std::int64_t>(a.samples);
    c.seed = a.seed;
    const bool dense = a.sampler == "dense" || (a.sampler == "auto" && ens.name == "gue");
    c.sampler = dense ? Sampler::dense_gaussian : Sampler::metropolis_loggas;
    c.metropolis.burn_in = a.burn_in;
    c.metropolis.thinning = a.thinning;
    c.metropolis.width = a.width;
    set = draw_samples(c, a.workers);
  }
  if (!a.save_samples.empty()) write_samples(set, a.save_samples);
  r.parameters["resolved_sampler"] = to_string(set.sampler);

  const auto& e = set.ensemble;
  const std::vector<double> lambdas =
      a.lambdas.size() == 1 ? std::vector<double>(a.K, a.lambdas[0]) : a.lambdas;
  if (static_cast<int>(lambdas.size()) != a.K) throw std::invalid_argument("mc: needs K lambdas or a single one");

  MCEstimate est;
  std::optional<std::complex<double>> ref;
  std::string kind;
  if (a.negative) {
    kind = "negative";
    NegativeMomentQuery q;
    q.epsilon = a.epsilon > 0.0 ? a.epsilon : 4e-4 * std::sqrt(e.M / e.N());
    r.parameters["resolved_epsilon"] = q.epsilon;
    const Side side = a.side == "minus" ? Side::minus : Side::plus;
    for (double l : lambdas) q.points.push_back({l, -1, side});
    est = estimate_negative_moment(set, q);
    bool equal = true;
    for (double l : lambdas) equal = equal && l == lambdas[0];
    if (a.exact && e.cls == EnsembleClass::unitary_gaussian && equal && a.K <= 3)
      ref = negative_moment_quadrature(lambdas, e.M, e.N(), side == Side::plus ? q.epsilon : -q.epsilon).value;
  } else {
    kind = "positive";
    const auto q = group_points(lambdas);
    est = estimate_fk(set, q);
    if (a.exact) ref = fk_confluent(e, q).value.to_double();
  }
  if (est.high_variance) err << "warning: relative standard error above 20%\n";
  std::vector<Cell> row{to_string(e.cls), static_cast<long long>(e.M), e.N(), static_cast<long long>(a.K),
                        join(lambdas), kind, est.mean.real(), est.mean.imag(), est.standard_error, est.log_scale,
                        static_cast<long long>(est.effective_samples), std::to_string(est.seed), set.acceptance};
  if (ref) {
    row.push_back(ref->real());
    row.push_back(ref->imag());
    row.push_back(est.z_score(*ref));
  } else {
    row.insert(row.end(), 3, Cell());
  }
  r.table.rows.push_back(std::move(row));
  return r;
}

struct ZetaArgs {
  std::vector<int> K{1};
  std::vector<double> T{1000.0};
  double step = 0.0;
  int workers = 1;
  int cutoff = 100000;
  double dk_table = 0.0;
  std::vector<double> sums;
};

inline Report run_zeta(const ZetaArgs& a) {
  Report r;
  r.command = "zeta";
  if (a.cutoff < 100) throw std::invalid_argument("zeta: --cutoff must be >= 100");
  if (a.dk_table > 0.0) {
    if (a.K.size() != 1) throw std::invalid_argument("zeta: --dk-table takes a single K");
    if (a.dk_table > 1e7) throw std::invalid_argument("zeta: --dk-table limited to 1e7 rows");
    const auto t = dk_sieve(a.K[0], static_cast<std::uint64_t>(a.dk_table));
    r.table.columns = {"n", "d_K"};
    for (std::uint64_t n = 1; n <= t.limit; ++n)
      r.table.rows.push_back({static_cast<long long>(n), static_cast<long long>(t(n))});
    return r;
  }
  if (!a.sums.empty()) {
    r.table.columns = {"K", "x", "exact", "prediction", "ratio", "weighted", "weighted_prediction",
                       "weighted_ratio", "a_K"};
    for (int k : a.K)
      for (double x : a.sums) {
        if (x < 2 || x != std::floor(x)) throw std::invalid_argument("zeta: --sums values must be integers >= 2");
        const auto s = sum_dk_squared(k, static_cast<std::uint64_t>(x), static_cast<std::uint32_t>(a.cutoff));
        r.table.rows.push_back({static_cast<long long>(k), x, std::to_string(s.exact), s.prediction,
                                static_cast<double>(s.exact) / s.prediction, s.weighted, s.weighted_prediction,
                                s.weighted / s.weighted_prediction, s.a_k});
      }
    return r;
  }
  r.table.columns = {"T", "K", "empirical", "predicted", "ratio", "step", "intervals"};
  for (int k : a.K)
    for (double t : a.T) {
      const auto z = zeta_moment({t, k, a.step}, static_cast<unsigned>(a.workers), static_cast<std::uint32_t>(a.cutoff));
      r.table.rows.push_back({t, static_cast<long long>(k), z.empirical, z.predicted, z.ratio, z.step,
                              static_cast<long long>(z.intervals)});
    }
  return r;
}

struct ConstantsArgs {
  int K = 4;
  bool gamma = false, hankel = false, sp = false, o = false;
};

inline std::string rational_string(const rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

inline Report run_constants(ConstantsArgs a) {
  Report r;
  r.command = "constants";
  if (a.K < 1 || a.K > 40) throw std::invalid_argument("constants: K must be in 1..40");
  if (!a.gamma && !a.hankel && !a.sp && !a.o) a.gamma = a.hankel = a.sp = a.o = true;
  r.table.columns = {"K"};
  if (a.gamma) r.table.columns.insert(r.table.columns.end(), {"gamma_K", "gamma_K_value"});
  if (a.hankel) r.table.columns.insert(r.table.columns.end(), {"hankel_det", "hankel_sign"});
  if (a.sp) r.table.columns.insert(r.table.columns.end(), {"sp_constant", "sp_constant_value"});
  if (a.o) r.table.columns.insert(r.table.columns.end(), {"o_constant", "o_constant_value"});
  rational sp = 1;
  for (int k = 1; k <= a.K; ++k) {
    const rational o = sp;  // prod_{l=1}^{K-1} l!/(2l)!
    sp *= factorial_rational(k) / factorial_rational(2 * k);
    std::vector<Cell> row{static_cast<long long>(k)};
    if (a.gamma) {
      const auto g = gamma_k(k);
      row.push_back(rational_string(g.gamma));
      row.push_back(g.value);
    }
    if (a.hankel) {
      const rational d = factorial_hankel_det(k);
      row.push_back(rational_string(d));
      row.push_back(static_cast<long long>((k * (k - 1) / 2) % 2 ? -1 : 1));
    }
    if (a.sp) {
      row.push_back(rational_string(sp));
      row.push_back(static_cast<double>(sp));
    }
    if (a.o) {
      row.push_back(rational_string(o));
      row.push_back(static_cast<double>(o));
    }
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

// Flat key=value file; keys are long option names of the chosen subcommand.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::FileError::Missing(path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

// Inserts config entries as flags after the subcommand name unless the same
// flag was given on the command line.
inline std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  if (args.empty()) throw CLI::CallForHelp();
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) throw CLI::ExtrasError({args[0]});
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& s : args) given = given || s == flag || s.rfind(flag + "=", 0) == 0;
    if (given) continue;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr) throw CLI::ExtrasError({flag});
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments of characteristic polynomials of random matrices and of the zeta function", "cpm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cpm::version));
  std::string format = "csv";
  std::string output;
  auto add_io = [&](CLI::App* s) {
    s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    s->add_option("--output", output, "output file (default stdout)");
  };

  ExactArgs ex;
  auto* exact = app.add_subcommand("exact", "exact finite-N moments");
  ex.ens.add(exact);
  exact->add_option("--N", ex.ens.N, "scale N")->required();
  exact->add_option("--M", ex.M, "matrix size (default by normalization)");
  exact->add_option("--K", ex.K, "moment order")->capture_default_str();
  exact->add_option("--lambda", ex.lambdas, "evaluation points")->delimiter(',');
  exact->add_option("--grid", ex.grid, "sweep start:stop:count of single-point rows");
  exact->add_option("--normalization", ex.normalization, "auto, raw-F, weighted-Phi, universal-M, normalized-origin")
      ->check(CLI::IsMember({"auto", "raw-F", "weighted-Phi", "universal-M", "normalized-origin"}))
      ->capture_default_str();
  add_io(exact);

  UniversalityArgs un;
  auto* univ = app.add_subcommand("universality", "quartic kernel and moments against the universal forms");
  univ->add_option("--g", un.g, "quartic coefficient")->capture_default_str();
  univ->add_option("--N", un.N, "matrix size")->capture_default_str();
  univ->add_option("--center", un.center, "spectral point")->capture_default_str();
  univ->add_option("--xmax", un.xmax, "largest Dyson separation")->capture_default_str();
  univ->add_option("--points", un.points, "kernel sweep points")->capture_default_str();
  univ->add_option("--K", un.K, "moment orders")->delimiter(',');
  univ->add_option("--tolerance", un.tolerance, "gate on the kernel sup deviation")->capture_default_str();
  add_io(univ);

  McArgs mc;
  mc.workers = default_workers();
  auto* mcc = app.add_subcommand("mc", "Monte Carlo estimates");
  mc.ens.add(mcc);
  mcc->add_option("--N", mc.ens.N, "scale N (default M)");
  mcc->add_option("--M", mc.M, "matrix size");
  mcc->add_option("--K", mc.K, "number of factors")->capture_default_str();
  mcc->add_option("--lambda", mc.lambdas, "points")->delimiter(',');
  mcc->add_option("--samples", mc.samples, "sample count")->capture_default_str();
  mcc->add_option("--seed", mc.seed, "seed")->capture_default_str();
  mcc->add_option("--sampler", mc.sampler, "auto, dense or loggas")
      ->check(CLI::IsMember({"auto", "dense", "loggas"}))
      ->capture_default_str();
  mcc->add_option("--workers", mc.workers, "threads (default $CPM_WORKERS or 1)")->check(CLI::PositiveNumber);
  mcc->add_option("--burn-in", mc.burn_in, "Metropolis burn-in sweeps per chunk")->capture_default_str();
  mcc->add_option("--thin", mc.thinning, "sweeps between samples")->capture_default_str();
  mcc->add_option("--width", mc.width, "proposal width (0 tunes)")->capture_default_str();
  mcc->add_flag("--negative", mc.negative, "inverse characteristic polynomials");
  mcc->add_option("--epsilon", mc.epsilon, "imaginary regulator (0: 1e-4 of the spectral width)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  mcc->add_option("--side", mc.side, "plus or minus")->check(CLI::IsMember({"plus", "minus"}))->capture_default_str();
  mcc->add_flag("--exact", mc.exact, "add the exact or quadrature reference");
  mcc->add_option("--save-samples", mc.save_samples, "write the sample file");
  mcc->add_option("--load-samples", mc.load_samples, "reuse a sample file");
  add_io(mcc);

  ZetaArgs zt;
  zt.workers = default_workers();
  auto* zeta = app.add_subcommand("zeta", "zeta moments and divisor sums");
  zeta->add_option("--K", zt.K, "moment orders")->delimiter(',');
  zeta->add_option("--T", zt.T, "window lengths")->delimiter(',');
  zeta->add_option("--step", zt.step, "integration step (0 = largest admissible)")->capture_default_str();
  zeta->add_option("--workers", zt.workers, "threads (default $CPM_WORKERS or 1)")->check(CLI::PositiveNumber);
  zeta->add_option("--cutoff", zt.cutoff, "Euler product prime cutoff")->capture_default_str();
  zeta->add_option("--dk-table", zt.dk_table, "dump d_K(n) for n up to this limit");
  zeta->add_option("--sums", zt.sums, "partial sums of d_K(n)^2 up to these x")->delimiter(',');
  add_io(zeta);

  ConstantsArgs cs;
  auto* cons = app.add_subcommand("constants", "exact constants");
  cons->add_option("--K", cs.K, "largest K")->capture_default_str();
  cons->add_flag("--gamma", cs.gamma, "gamma_K");
  cons->add_flag("--hankel", cs.hankel, "factorial Hankel determinant");
  cons->add_flag("--sp", cs.sp, "symplectic constant");
  cons->add_flag("--o", cs.o, "orthogonal constant");
  add_io(cons);

  try {
    auto merged = merge_config(app, std::move(args));
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << cpm::version << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "cpm: " << e.what() << "\n";
    return usage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    Report report;
    bool passed = true;
    if (chosen == exact)
      report = run_exact(ex);
    else if (chosen == univ)
      report = run_universality(un, passed);
    else if (chosen == mcc)
      report = run_mc(mc, err);
    else if (chosen == zeta)
      report = run_zeta(zt);
    else
      report = run_constants(cs);
    // Every option except the output plumbing and the worker count, which do
    // not change the result.
    for (const CLI::Option* opt : chosen->get_options()) {
      const std::string name = opt->get_name();
      if (name == "--help" || name == "--output" || name == "--workers") continue;
      std::string v;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
        if (res.empty()) v = "true";
      } else {
        v = opt->get_default_str();
      }
      if (!report.parameters.contains(name.substr(2))) report.parameters[name.substr(2)] = v;
    }
    if (output.empty()) {
      write_report(report, format, out);
    } else {
      std::ofstream f(output, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file " + output);
      write_report(report, format, f);
    }
    return passed ? ok : gate_failed;
  } catch (const std::invalid_argument& e) {
    err << "cpm: " << e.what() << "\n";
    return usage;
  } catch (const std::out_of_range& e) {
    err << "cpm: " << e.what() << "\n";
    return usage;
  } catch (const std::length_error& e) {
    err << "cpm: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "cpm: numerical failure: " << e.what() << "\n";
    return numerical;
  }
}

}  // namespace cpm::cli
