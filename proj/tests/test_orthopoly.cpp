#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cpm/orthopoly.hpp"
#include "oracles.hpp"

using namespace cpm;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Orthopoly, GaussianNormAtDegreeZero) {
  const auto b = build_basis(WeightSpec::gaussian(1.0), 4);
  EXPECT_NEAR(std::exp(b.log_norm(0)), std::sqrt(2.0 * std::numbers::pi), 1e-14);
  EXPECT_DOUBLE_EQ(b.beta(1), 1.0);
  EXPECT_DOUBLE_EQ(b.beta(2), 2.0);
}

TEST(Orthopoly, LaguerreHalfNormAtDegreeZero) {
  const auto b = build_basis(WeightSpec::laguerre_half(1.0), 3);
  EXPECT_NEAR(std::exp(b.log_norm(0)), std::sqrt(std::numbers::pi) / 2.0, 1e-14);
}

TEST(Orthopoly, ClosedFormNormsMatchRecurrence) {
  for (auto w : {WeightSpec::gaussian(7.0), WeightSpec::laguerre_half(5.0), WeightSpec::laguerre_minus_half(3.5)}) {
    const auto b = build_basis(w, 60);
    for (int n = 1; n <= 60; ++n)
      EXPECT_LT(std::abs(std::expm1(b.log_norm(n) - b.log_norm(n - 1) - std::log(b.beta(n)))), 1e-10);
  }
}

TEST(Orthopoly, EvalPolySmallCases) {
  const auto g = build_basis(WeightSpec::gaussian(1.0), 5);
  EXPECT_EQ(eval_poly(g, 0, 3.7).to_double(), 1.0);
  EXPECT_NEAR(eval_poly(g, 2, 2.0).to_double(), 3.0, 1e-14);
  const auto l = build_basis(WeightSpec::laguerre_half(1.0), 3);
  EXPECT_NEAR(eval_poly(l, 1, 2.0).to_double(), 0.5, 1e-14);
}

TEST(Orthopoly, EvalPolyMatchesExplicitSums) {
  const auto g = build_basis(WeightSpec::gaussian(3.0), 20);
  const auto lh = build_basis(WeightSpec::laguerre_half(2.0), 15);
  const auto lm = build_basis(WeightSpec::laguerre_minus_half(2.0), 15);
  for (double x : {-1.7, -0.3, 0.0, 0.45, 1.9}) {
    for (int n = 0; n <= 20; ++n)
      EXPECT_NEAR(eval_poly(g, n, x).to_double(), oracle::monic_hermite(n, 3.0, x),
                  1e-9 * (1.0 + std::abs(oracle::monic_hermite(n, 3.0, x))));
  }
  for (double y : {0.0, 0.2, 1.1, 3.3}) {
    for (int n = 0; n <= 15; ++n) {
      const double a = oracle::monic_laguerre(n, 0.5, 2.0, y);
      const double c = oracle::monic_laguerre(n, -0.5, 2.0, y);
      EXPECT_NEAR(eval_poly(lh, n, y).to_double(), a, 1e-9 * (1.0 + std::abs(a)));
      EXPECT_NEAR(eval_poly(lm, n, y).to_double(), c, 1e-9 * (1.0 + std::abs(c)));
    }
  }
}

TEST(Orthopoly, DegreeOutOfRangeThrows) {
  const auto g = build_basis(WeightSpec::gaussian(1.0), 3);
  EXPECT_THROW(eval_poly(g, 4, 0.0), std::out_of_range);
  EXPECT_THROW(eval_poly(g, -1, 0.0), std::out_of_range);
  EXPECT_THROW(cd_kernel(g, 5, 0.0, 0.0), std::out_of_range);
}

TEST(Orthopoly, Derivatives) {
  const auto g = build_basis(WeightSpec::gaussian(1.0), 5);
  auto d = eval_poly_derivatives(g, 2, 0.0, 1);
  EXPECT_NEAR(d[0].to_double(), -1.0, 1e-15);
  EXPECT_EQ(d[1].to_double(), 0.0);
  d = eval_poly_derivatives(g, 0, 1.3, 2);
  EXPECT_EQ(d[0].to_double(), 1.0);
  EXPECT_TRUE(d[1].is_zero());
  EXPECT_TRUE(d[2].is_zero());
  d = eval_poly_derivatives(g, 3, 1.0, 1);
  EXPECT_NEAR(d[0].to_double(), -2.0, 1e-14);
  EXPECT_NEAR(d[1].to_double(), 0.0, 1e-14);
}

TEST(Orthopoly, HermiteDerivativeIdentity) {
  const auto g = build_basis(WeightSpec::gaussian(2.5), 40);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int t = 0; t < 20; ++t) {
    const double x = u(rng);
    for (int n = 1; n <= 40; ++n) {
      const auto d = eval_poly_derivatives(g, n, x, 1);
      const auto lower = eval_poly(g, n - 1, x) * ScaledValue(static_cast<double>(n));
      EXPECT_LT(relative_difference(d[1], lower), 1e-10);
    }
  }
}

TEST(Orthopoly, KernelSingleTerm) {
  const auto g = build_basis(WeightSpec::gaussian(1.0), 3);
  for (double x : {-1.0, 0.0, 0.7, 2.2})
    EXPECT_NEAR(cd_kernel(g, 1, x, x), std::exp(-x * x / 2.0) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(Orthopoly, KernelTraceIsM) {
  for (auto w : {WeightSpec::gaussian(4.0), WeightSpec::laguerre_half(3.0), WeightSpec::laguerre_minus_half(3.0),
                 WeightSpec::quartic(6.0, 0.1)}) {
    const int m = 12;
    const auto b = build_basis(w, 40);
    // m + 1 nodes are exact for K(x, x) / w(x), of degree 2m - 2. Larger rules
    // reach nodes where the tiny weights lose relative precision.
    const auto rule = gauss_rule(b, m + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i];
      s += rule.weights[i] * cd_kernel(b, m, x, x) * std::exp(-w.log_weight(x));
    }
    EXPECT_NEAR(s, m, 1e-8 * m) << to_string(w.family);
  }
}

TEST(Orthopoly, KernelDensityAtOrigin) {
  const auto g = build_basis(WeightSpec::gaussian(100.0), 100);
  EXPECT_LT(rel(cd_kernel(g, 100, 0.0, 0.0) / 100.0, 1.0 / std::numbers::pi), 0.01);
}

TEST(Orthopoly, KernelSymmetricAndReproducing) {
  const auto b = build_basis(WeightSpec::quartic(10.0, 0.1), 30);
  const int m = 15;
  const auto grid = oracle::legendre_grid(-4.0, 4.0, 40);
  for (auto [x, y] : {std::pair{0.1, -0.4}, std::pair{0.8, 0.2}, std::pair{-1.0, 1.0}}) {
    EXPECT_NEAR(cd_kernel(b, m, x, y), cd_kernel(b, m, y, x), 1e-14);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.x.size(); ++i)
      s += grid.w[i] * cd_kernel(b, m, x, grid.x[i]) * cd_kernel(b, m, grid.x[i], y);
    EXPECT_NEAR(s, cd_kernel(b, m, x, y), 1e-6);
  }
}

// Orthogonality on an independent grid.
TEST(Orthopoly, OrthogonalityOnIndependentGrid) {
  struct Case {
    WeightSpec w;
    double a, b;
  };
  std::vector<Case> cases{{WeightSpec::gaussian(3.0), -8.0, 8.0},
                          {WeightSpec::quartic(4.0, 0.1), -5.0, 5.0},
                          {WeightSpec::general(2.0, {0.0, 0.0, 0.0, 0.0, 1.0}), -4.0, 4.0},
                          {WeightSpec::laguerre_half(6.0), 0.0, 30.0},
                          {WeightSpec::laguerre_minus_half(6.0), 0.0, 30.0}};
  for (const auto& c : cases) {
    const auto basis = build_basis(c.w, 30);
    // For the y^{-1/2} weight substitute y = s^2 to remove the endpoint singularity.
    const bool sqrt_map = c.w.half_line();
    const auto grid = oracle::legendre_grid(sqrt_map ? 0.0 : c.a, sqrt_map ? std::sqrt(c.b) : c.b, 200);
    std::vector<std::vector<double>> p(31, std::vector<double>(grid.x.size()));
    std::vector<double> wq(grid.x.size());
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
      const double x = sqrt_map ? grid.x[i] * grid.x[i] : grid.x[i];
      const double jac = sqrt_map ? 2.0 * grid.x[i] : 1.0;
      wq[i] = grid.w[i] * jac * std::exp(c.w.log_weight(x));
      const auto table = derivative_table(basis, x, 0, 30, 0);
      for (int n = 0; n <= 30; ++n) p[n][i] = table[n][0].to_double();
    }
    for (int m = 0; m <= 30; ++m)
      for (int n = 0; n <= m; ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < wq.size(); ++i) s += wq[i] * p[m][i] * p[n][i];
        const double hm = std::exp(basis.log_norm(m)), hn = std::exp(basis.log_norm(n));
        if (m == n)
          EXPECT_LT(rel(s, hn), 1e-8) << to_string(c.w.family) << " n=" << n;
        else
          EXPECT_LT(std::abs(s) / std::sqrt(hm * hn), 1e-8) << to_string(c.w.family) << " " << m << "," << n;
      }
  }
}

TEST(Orthopoly, StieltjesReproducesGaussianRecurrence) {
  const auto exact = build_basis(WeightSpec::gaussian(5.0), 40);
  const auto disc = build_basis(WeightSpec::general(5.0, {0.0, 0.0, 0.5}), 40);
  for (int n = 0; n <= 40; ++n) {
    EXPECT_NEAR(disc.alpha(n), 0.0, 1e-10);
    EXPECT_NEAR(disc.log_norm(n), exact.log_norm(n), 1e-9);
    if (n > 0) EXPECT_LT(rel(disc.beta(n), exact.beta(n)), 1e-10);
  }
  ASSERT_TRUE(disc.support_cutoff().has_value());
  EXPECT_GT(disc.quadrature_nodes(), 40u * 40u);
}

TEST(Orthopoly, ShiftedPotentialHasNonzeroAlpha) {
  // V(x) = (x - 1)^2 / 2 shifts the Hermite recurrence by alpha = 1.
  const auto b = build_basis(WeightSpec::general(3.0, {0.5, -1.0, 0.5}), 20);
  for (int n = 0; n <= 20; ++n) EXPECT_NEAR(b.alpha(n), 1.0, 1e-10);
}

TEST(Orthopoly, InvalidWeights) {
  EXPECT_THROW(build_basis(WeightSpec::gaussian(0.0), 3), std::invalid_argument);
  EXPECT_THROW(build_basis(WeightSpec::quartic(1.0, -1.0), 3), std::invalid_argument);
  EXPECT_THROW(build_basis(WeightSpec::general(1.0, {0.0, 0.0, 0.0, 1.0}), 3), std::invalid_argument);
  EXPECT_THROW(build_basis(WeightSpec::gaussian(1.0), -1), std::invalid_argument);
}

TEST(Orthopoly, LargeDegreeStaysFinite) {
  const auto g = build_basis(WeightSpec::gaussian(200.0), 420);
  const auto v = eval_poly(g, 420, 1.5);
  EXPECT_TRUE(std::isfinite(v.log_magnitude()));
  EXPECT_NEAR(cd_kernel(g, 400, 0.0, 0.0) / 400.0 * 2.0, 1.0 / std::numbers::pi * std::sqrt(2.0), 0.02);
}

TEST(Orthopoly, GaussRuleIntegratesPolynomials) {
  const auto b = build_basis(WeightSpec::laguerre_half(2.0), 10);
  const auto rule = gauss_rule(b, 10);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s0 += rule.weights[i];
    s1 += rule.weights[i] * rule.nodes[i];
  }
  EXPECT_LT(rel(s0, std::exp(b.log_norm(0))), 1e-13);
  EXPECT_LT(rel(s1 / s0, b.alpha(0)), 1e-13);
}

TEST(Orthopoly, JsonDump) {
  const auto b = build_basis(WeightSpec::gaussian(2.0), 3);
  const auto j = to_json(b);
  EXPECT_EQ(j["family"], "gaussian");
  EXPECT_EQ(j["alpha"].size(), 4u);
  EXPECT_EQ(j["log_h"].size(), 4u);
  EXPECT_FALSE(j.contains("support_cutoff"));
  const auto q = to_json(build_basis(WeightSpec::quartic(3.0, 0.1), 5));
  EXPECT_TRUE(q["support_cutoff_heuristic"].get<bool>());
}

TEST(ScaledValueTest, AssociativityAcrossRange) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lg(-500.0, 500.0);
  for (int t = 0; t < 200; ++t) {
    const auto a = ScaledValue::from_log(lg(rng), {1.0, 0.3});
    const auto b = ScaledValue::from_log(lg(rng), -1.0);
    const auto c = ScaledValue::from_log(lg(rng));
    EXPECT_NEAR(((a * b) * c).log_magnitude(), (a * (b * c)).log_magnitude(), 1e-12);
  }
}

TEST(ScaledValueTest, ZeroSemantics) {
  const auto z = ScaledValue::zero();
  const auto x = ScaledValue::from_log(700.0, -1.0);
  EXPECT_TRUE((z * x).is_zero());
  EXPECT_EQ((z + x).log_magnitude(), x.log_magnitude());
  EXPECT_EQ((x + z).sign(), -1);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_THROW(x / z, std::domain_error);
  EXPECT_NEAR(ScaledValue(-3.0).to_double(), -3.0, 1e-15);
  EXPECT_NEAR((ScaledValue(2.0) + ScaledValue(-5.0)).to_double(), -3.0, 1e-14);
}
