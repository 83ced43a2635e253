#include <doctest.h>

#include <random>

#include "koiter/errors.hpp"
#include "koiter/solver.hpp"

using namespace koiter;

namespace {

SparseMatrix laplacian(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0), t.emplace_back(i - 1, i, -1.0);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SparseMatrix random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::bernoulli_distribution keep(0.08);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || keep(rng)) B(i, j) = u(rng);
  Eigen::MatrixXd D = B * B.transpose() + Eigen::MatrixXd::Identity(n, n);
  return D.sparseView();
}

}  // namespace

TEST_CASE("diagonal system") {
  SparseMatrix A(5, 5);
  for (int i = 0; i < 5; ++i) A.insert(i, i) = i + 1.0;
  const auto r = factor_solve(A, Eigen::VectorXd::Ones(5));
  for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(1.0 / (i + 1)).epsilon(1e-15));
  CHECK(r.report.method == SolveMethod::DirectCholesky);
  CHECK(r.report.residual < 1e-15);
}

TEST_CASE("identity returns the rhs") {
  SparseMatrix I(4, 4);
  I.setIdentity();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(4, -1, 2);
  CHECK((factor_solve(I, b).x - b).norm() == 0.0);
}

TEST_CASE("1D Laplacian matches a dense solve") {
  const SparseMatrix A = laplacian(10);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(10);
  const Eigen::VectorXd ref = Eigen::MatrixXd(A).ldlt().solve(b);
  for (auto m : {SolveMethod::DirectCholesky, SolveMethod::PreconditionedCG}) {
    const auto r = factor_solve(A, b, {.method = m});
    CHECK((r.x - ref).norm() < 1e-8 * ref.norm());
    CHECK(r.report.method == m);
  }
  // closed form: x_i = (i+1)(n-i)/2
  const auto r = factor_solve(A, b);
  for (int i = 0; i < 10; ++i) CHECK(r.x[i] == doctest::Approx((i + 1) * (10 - i) / 2.0).epsilon(1e-12));
}

TEST_CASE("random SPD system, residual and permutation invariance") {
  std::mt19937_64 rng(42);
  const int n = 50;
  const SparseMatrix A = random_spd(n, rng);
  Eigen::VectorXd b(n);
  std::normal_distribution<double> nd;
  for (int i = 0; i < n; ++i) b[i] = nd(rng);
  const Eigen::VectorXd ref = Eigen::MatrixXd(A).llt().solve(b);
  const auto r = factor_solve(A, b);
  CHECK((r.x - ref).norm() < 1e-10 * ref.norm());
  CHECK(std::abs(r.report.residual - (A * r.x - b).norm() / b.norm()) < 1e-14);
  CHECK(r.report.fill >= n);

  Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(n, 0, n - 1);
  std::shuffle(idx.data(), idx.data() + n, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> P(idx);
  const SparseMatrix PA = (P * A * P.transpose()).eval();
  const auto rp = factor_solve(PA, P * b);
  CHECK((P.transpose() * rp.x - r.x).norm() < 1e-9 * r.x.norm());

  const auto again = factor_solve(A, b);
  CHECK(again.x == r.x);
}

TEST_CASE("solver errors") {
  SparseMatrix A = laplacian(6);
  A.coeffRef(3, 3) = -5.0;
  CHECK_THROWS_AS(factor_solve(A, Eigen::VectorXd::Ones(6), {.method = SolveMethod::DirectCholesky}),
                  NotPositiveDefinite);
  CHECK_THROWS_AS(factor_solve(laplacian(400), Eigen::VectorXd::Ones(400),
                               {.method = SolveMethod::PreconditionedCG, .max_iterations = 5}),
                  NoConvergence);
  CHECK_THROWS_AS(parse_solve_method("lu"), ConfigError);
  CHECK(parse_solve_method("cg") == SolveMethod::PreconditionedCG);
}
