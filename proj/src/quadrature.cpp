#include "koiter/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace koiter {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

TriRule triangle_rule(int degree) {
  // integrand of degree d becomes degree d + 1 in the collapsed direction
  const int n = std::max(1, (degree + 3) / 2);
  const GaussRule g = gauss_legendre(n);
  TriRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = 0.5 * (g.x[i] + 1.0), v = 0.5 * (g.x[j] + 1.0);
      const double x = u, y = v * (1.0 - u);
      r.bary.emplace_back(1.0 - x - y, x, y);
      r.w.push_back(0.25 * g.w[i] * g.w[j] * (1.0 - u));
    }
  return r;
}

PrismRule prism_rule(int degree) {
  return {triangle_rule(degree), gauss_legendre(std::max(1, (degree + 2) / 2)), degree};
}

}  // namespace koiter
