#pragma once

#include <string>

#include "koiter/fem.hpp"

namespace koiter {

enum class SolveMethod { Auto, DirectCholesky, PreconditionedCG };

std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& text);

struct SolverOptions {
  SolveMethod method = SolveMethod::Auto;
  double tol = 0.0;            // 0: 1e-10 direct, 1e-8 iterative
  int auto_threshold = 200000; // Auto switches to CG above this many dofs
  int refinement_steps = 10;
  int max_iterations = 0;      // CG cap; 0 means 10 ndof
  // Accept a direct solve whose residual misses tol but lies within
  // floor_factor of the rounding floor, i.e. no double vector does better.
  bool accept_rounding_floor = false;
  double floor_factor = 4.0;
};

struct SolveReport {
  SolveMethod method = SolveMethod::DirectCholesky;
  int iterations = 0;      // CG iterations, or refinement sweeps for the direct path
  double residual = 0.0;   // ||A x - b|| / ||b||
  long long fill = 0;      // nonzeros of the Cholesky factor
  double rounding_floor = 0.0;  // u || |A| |x| || / ||b||
  bool floor_limited = false;   // accepted above tol because of the floor
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Solves A x = b for symmetric positive definite A. The direct path is a
/// simplicial LLT with AMD ordering on the diagonally scaled matrix, followed
/// by iterative refinement with residuals accumulated in long double; the
/// fallback is Jacobi-preconditioned CG with at most 10 ndof iterations.
/// Throws NotPositiveDefinite, SingularSystem or NoConvergence.
SolveResult factor_solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverOptions& opts = {});

/// u || |A| |x| || / ||b||: the residual that rounding x to double alone
/// can produce.
double rounding_floor(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);
/// ||b - A x|| / ||b||, accumulated in long double.
double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Solves a constrained system into a field on `layout`; constrained entries
/// are set to exactly zero.
DiscreteField solve(const SparseSystem& system, LayoutPtr layout, const SolverOptions& opts = {},
                    SolveReport* report = nullptr);

}  // namespace koiter
