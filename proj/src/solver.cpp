#include "koiter/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "koiter/errors.hpp"

namespace koiter {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Auto: return "auto";
    case SolveMethod::DirectCholesky: return "cholesky";
    case SolveMethod::PreconditionedCG: return "cg";
  }
  return "?";
}

SolveMethod parse_solve_method(const std::string& text) {
  if (text == "auto") return SolveMethod::Auto;
  if (text == "cholesky" || text == "direct") return SolveMethod::DirectCholesky;
  if (text == "cg" || text == "iterative") return SolveMethod::PreconditionedCG;
  throw ConfigError("unknown solver.method '" + text + "' (auto, cholesky, cg)");
}

namespace {

// b - A x accumulated in long double, so that the refinement sees residuals
// below the rounding level of the products
Eigen::Matrix<long double, Eigen::Dynamic, 1> residual_ld(const SparseMatrix& A, const Eigen::VectorXd& x,
                                                          const Eigen::VectorXd& b) {
  Eigen::Matrix<long double, Eigen::Dynamic, 1> r = b.cast<long double>();
  for (int j = 0; j < A.outerSize(); ++j) {
    const long double xj = x[j];
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) r[it.row()] -= static_cast<long double>(it.value()) * xj;
  }
  return r;
}

}  // namespace

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = static_cast<double>(residual_ld(A, x, b).norm());
  return nb > 0.0 ? nr / nb : nr;
}

double rounding_floor(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  Eigen::VectorXd ax = Eigen::VectorXd::Zero(A.rows());
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) ax[it.row()] += std::abs(it.value() * x[j]);
  const double nb = b.norm();
  const double u = 0.5 * std::numeric_limits<double>::epsilon();
  return nb > 0.0 ? u * ax.norm() / nb : 0.0;
}

namespace {

SolveResult direct(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverOptions& opts, double tol) {
  // symmetric diagonal scaling S A S, S = diag(A)^(-1/2), evens out the
  // value and gradient dofs of the C1 space before factorizing
  const Eigen::VectorXd d = A.diagonal();
  if ((d.array() <= 0.0).any()) throw NotPositiveDefinite("non-positive diagonal entry");
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const SparseMatrix As = s.asDiagonal() * A * s.asDiagonal();
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(As);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky factorization failed (matrix not positive definite on free dofs)");
  auto apply = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return s.cwiseProduct(llt.solve(s.cwiseProduct(r)));
  };
  SolveResult r;
  r.report.method = SolveMethod::DirectCholesky;
  r.report.fill = llt.matrixL().nestedExpression().nonZeros();
  r.x = apply(b);
  r.report.residual = relative_residual(A, r.x, b);
  for (int k = 0; k < opts.refinement_steps && r.report.residual > 1e-3 * tol; ++k) {
    const Eigen::VectorXd x = r.x + apply(residual_ld(A, r.x, b).cast<double>());
    const double res = relative_residual(A, x, b);
    if (!(res < r.report.residual)) break;
    r.x = x;
    r.report.residual = res;
    r.report.iterations = k + 1;
  }
  r.report.rounding_floor = rounding_floor(A, r.x, b);
  if (std::isfinite(r.report.residual) && r.report.residual >= tol && opts.accept_rounding_floor &&
      r.report.residual < opts.floor_factor * r.report.rounding_floor)
    r.report.floor_limited = true;
  else if (!std::isfinite(r.report.residual) || r.report.residual >= tol)
    throw SingularSystem(fmt::format("direct solve residual {:.3e} above {:.1e} (rounding floor {:.1e})",
                                     r.report.residual, tol, r.report.rounding_floor));
  return r;
}

SolveResult iterative(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverOptions& opts, double tol) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setMaxIterations(opts.max_iterations > 0 ? opts.max_iterations : 10 * static_cast<int>(A.rows()));
  cg.setTolerance(0.5 * tol);
  cg.compute(A);
  SolveResult r;
  r.report.method = SolveMethod::PreconditionedCG;
  r.x = cg.solve(b);
  r.report.iterations = static_cast<int>(cg.iterations());
  r.report.residual = relative_residual(A, r.x, b);
  if (!std::isfinite(r.report.residual) || r.report.residual >= tol)
    throw NoConvergence(fmt::format("CG stopped after {} iterations with residual {:.3e}", r.report.iterations,
                                    r.report.residual));
  return r;
}

}  // namespace

SolveResult factor_solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverOptions& opts) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw SingularSystem("matrix and rhs sizes disagree");
  if (b.size() == 0) return {};
  SolveMethod m = opts.method;
  if (m == SolveMethod::Auto)
    m = A.rows() > opts.auto_threshold ? SolveMethod::PreconditionedCG : SolveMethod::DirectCholesky;
  if (m == SolveMethod::DirectCholesky) return direct(A, b, opts, opts.tol > 0.0 ? opts.tol : 1e-10);
  return iterative(A, b, opts, opts.tol > 0.0 ? opts.tol : 1e-8);
}

DiscreteField solve(const SparseSystem& system, LayoutPtr layout, const SolverOptions& opts, SolveReport* report) {
  if (layout->ndof() != system.ndof()) throw SpaceMeshMismatch("system and layout sizes disagree");
  auto r = factor_solve(system.matrix, system.rhs, opts);
  for (int i = 0; i < system.ndof(); ++i)
    if (system.constrained[i]) r.x[i] = 0.0;
  if (report) *report = r.report;
  return {std::move(layout), std::move(r.x)};
}

}  // namespace koiter
