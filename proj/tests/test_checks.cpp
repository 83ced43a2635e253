#include <doctest.h>

#include "koiter/checks.hpp"
#include "koiter/errors.hpp"

using namespace koiter;

TEST_CASE("geometry suite on the built-in charts") {
  for (const char* name : {"plane", "ellipsoid", "cylinder", "cone"}) {
    CAPTURE(name);
    const auto rep = geometry_suite(*make_chart(name, {}));
    CHECK(rep.pass());
    CHECK(rep.checks.size() == 4);
    CHECK(kinematics_suite(*make_chart(name, {})).pass());
  }
}

TEST_CASE("geometry suite reports a degenerate chart") {
  // the cone apex y2 = 0 lies on the rectangle edge
  const auto cone = make_chart("cone", {{"y2min", 0.0}});
  const auto rep = geometry_suite(*cone);
  CHECK(!rep.pass());
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].detail.rfind("DegenerateChart", 0) == 0);
}

TEST_CASE("plane reductions and conformity") {
  const auto p = plane_reduction_suite();
  CHECK(p.pass());
  CHECK(p.checks.size() == 4);
  const auto c = conformity_suite(8);
  CHECK(c.pass());
  for (const auto& x : c.checks) CHECK(x.value < 1e-10);
}

TEST_CASE("check report bookkeeping") {
  CheckReport r;
  CHECK(!r.pass());
  r.add("a", 1.0, 2.0);
  CHECK(r.pass());
  r.add("nan", NAN, 1.0);
  CHECK(!r.pass());
}

TEST_CASE("system audit") {
  SparseMatrix A(2, 2);
  A.insert(0, 0) = 4;
  A.insert(0, 1) = 1;
  A.insert(1, 0) = 1.5;
  A.insert(1, 1) = 2;
  CHECK(relative_asymmetry(A) == doctest::Approx(0.125));
  SystemAudit audit;
  SolveReport r;
  r.residual = 3e-12;
  audit.record("first", A, r);
  r.residual = 1e-13;
  audit.record("second", SparseMatrix(Eigen::MatrixXd::Identity(2, 2).sparseView()), r);
  CHECK(audit.systems == 2);
  CHECK(audit.worst_residual == 3e-12);
  CHECK(audit.worst_residual_label == "first");
  CHECK(audit.worst_asymmetry_label == "first");
}
