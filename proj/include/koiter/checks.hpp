#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koiter/fem.hpp"
#include "koiter/solver.hpp"

namespace koiter {

/// One measured invariant: `value` must stay at or below `limit`.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<Check> checks;

  bool pass() const;
  void add(std::string name, double value, double limit, std::string detail = {});
  void fail(std::string name, std::string detail);
};

/// Invariant suite of a chart at `points` random points plus a grid covering
/// the rectangle edges: analytic partials against central differences
/// (relative 1e-6), kappa = det(b_a^b) (1e-10), the vanishing Christoffel
/// symbols of the thick shell (1e-12) and |a_1 x a_2| > 0.
CheckReport geometry_suite(const Chart& chart, int points = 100, std::uint64_t seed = 1);

/// gamma and rho of random quadratic fields against a Cartesian oracle built
/// from central differences of eta_i a^i (relative 1e-6 and 1e-5).
CheckReport kinematics_suite(const Chart& chart, int points = 20, std::uint64_t seed = 1);

/// Plane-chart reductions: gamma is the symmetric gradient and rho the
/// Hessian of eta_3, and the scaled 3D form on two triangles times two layers
/// equals Cartesian linear elasticity, all entrywise to 1e-10.
CheckReport plane_reduction_suite(std::uint64_t seed = 1);

/// Reduced-HCT C1 trace agreement on every interior edge of an n x n mesh and
/// vanishing clamped traces, both to 1e-10.
CheckReport conformity_suite(int n = 32, std::uint64_t seed = 1);

/// Accumulates symmetry, positive definiteness and residuals over solves.
struct SystemAudit {
  int systems = 0;
  double worst_asymmetry = 0.0;  // max |A - A^T| / max |A|
  double worst_residual = 0.0;
  double worst_floor = 0.0;      // rounding floor of the worst-residual solve
  std::string worst_asymmetry_label, worst_residual_label;
  std::vector<std::string> failures;  // solves that raised NotPositiveDefinite

  void record(const std::string& label, const SparseMatrix& A, const SolveReport& report);
};

double relative_asymmetry(const SparseMatrix& A);

}  // namespace koiter
