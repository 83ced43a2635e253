#pragma once

#include <vector>

#include "koiter/geometry.hpp"

namespace koiter {

/// Gauss-Legendre rule on [-1, 1] with n points (exact to degree 2n - 1).
struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_legendre(int n);

/// Rule on the reference triangle {(0,0), (1,0), (0,1)}; points are
/// barycentric (l0, l1, l2) and weights sum to 1/2.
struct TriRule {
  int degree = 0;
  std::vector<Vec3> bary;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

/// Collapsed (Duffy) Gauss product rule exact for polynomials of total
/// degree <= degree.
TriRule triangle_rule(int degree);

/// Triangle rule times Gauss-Legendre on [-1, 1]; weights sum to 1.
struct PrismRule {
  TriRule tri;
  GaussRule line;
  int degree = 0;
};
PrismRule prism_rule(int degree);

}  // namespace koiter
