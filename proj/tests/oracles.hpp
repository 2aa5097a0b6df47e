#pragma once

// Independent reference implementations used only by the tests. None of these
// go through the recurrence machinery of the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace oracle {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(double n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (n - i) / (i + 1.0);
  return r;
}

// Monic Hermite orthogonal for exp(-N x^2 / 2): N^{-n/2} He_n(sqrt(N) x),
// He_n from its explicit sum.
inline double monic_hermite(int n, double N, double x) {
  const double z = std::sqrt(N) * x;
  double s = 0.0;
  for (int m = 0; 2 * m <= n; ++m)
    s += (m % 2 ? -1.0 : 1.0) * std::pow(z, n - 2 * m) / (factorial(m) * factorial(n - 2 * m) * std::pow(2.0, m));
  return factorial(n) * s * std::pow(N, -0.5 * n);
}

// Monic Laguerre orthogonal for y^a exp(-N y): (-1)^n n! N^{-n} L_n^{(a)}(N y).
inline double monic_laguerre(int n, double a, double N, double y) {
  const double z = N * y;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += (i % 2 ? -1.0 : 1.0) * binomial(n + a, n - i) * std::pow(z, i) / factorial(i);
  return (n % 2 ? -1.0 : 1.0) * factorial(n) * std::pow(N, -n) * s;
}

// Composite Gauss-Legendre rule on [a, b].
struct Grid {
  std::vector<double> x, w;
};

inline Grid legendre_grid(double a, double b, int panels) {
  using boost::math::quadrature::gauss;
  const auto& ab = gauss<double, 30>::abscissa();
  const auto& wt = gauss<double, 30>::weights();
  Grid g;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < ab.size(); ++i) {
      g.x.push_back(mid + 0.5 * h * ab[i]);
      g.w.push_back(0.5 * h * wt[i]);
      if (ab[i] != 0.0) {
        g.x.push_back(mid - 0.5 * h * ab[i]);
        g.w.push_back(0.5 * h * wt[i]);
      }
    }
  }
  return g;
}

// <f(y_1..y_M)> under prod w(y_i) Delta^2(y), by a tensor grid in x with
// y = map(x); weight(x) must include the Jacobian. M <= 3.
inline double eigenvalue_average(int M, const Grid& grid, const std::function<double(double)>& weight,
                                 const std::function<double(const std::vector<double>&)>& f,
                                 const std::function<double(double)>& map = [](double x) { return x; }) {
  Grid g = grid;
  const std::size_t n = g.x.size();
  std::vector<double> wx(n);
  for (std::size_t i = 0; i < n; ++i) {
    wx[i] = g.w[i] * weight(g.x[i]);
    g.x[i] = map(g.x[i]);
  }
  double num = 0.0, den = 0.0;
  std::vector<double> pt(M);
  auto vdm2 = [&] {
    double v = 1.0;
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j) v *= (pt[i] - pt[j]) * (pt[i] - pt[j]);
    return v;
  };
  if (M == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      pt[0] = g.x[i];
      num += wx[i] * f(pt);
      den += wx[i];
    }
  } else if (M == 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        pt[0] = g.x[i];
        pt[1] = g.x[j];
        const double m = wx[i] * wx[j] * vdm2();
        num += m * f(pt);
        den += m;
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          pt[0] = g.x[i];
          pt[1] = g.x[j];
          pt[2] = g.x[k];
          const double m = wx[i] * wx[j] * wx[k] * vdm2();
          num += m * f(pt);
          den += m;
        }
  }
  return num / den;
}

}  // namespace oracle
