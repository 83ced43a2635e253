#include <doctest.h>

#include <cmath>
#include <numbers>

#include "koiter/errors.hpp"
#include "koiter/experiments.hpp"
#include "test_support.hpp"

using namespace koiter;

namespace {

ShellCase tiny(const std::string& name, std::vector<double> eps) {
  auto c = builtin_case(name);
  c.mesh = {4, 4, 2, 2, 2};
  c.eps_list = std::move(eps);
  return c;
}

// nodal P2 prism field with covariant components u_i(y, x3) = f(i, y, x3)
template <class F>
DiscreteField prism_field(std::shared_ptr<const PrismMesh> pm, F f) {
  const auto s = FunctionSpace::lagrange_prism(pm, 2);
  auto layout = std::make_shared<MixedSpace>(std::vector<SpacePtr>{s, s, s});
  Eigen::VectorXd c(layout->ndof());
  for (int i = 0; i < 3; ++i)
    for (int d = 0; d < s->ndof(); ++d) {
      const Vec3 x = s->node(d);
      c[layout->offset(i) + d] = f(i, Vec2(x[0], x[1]), x[2]);
    }
  return {layout, c};
}

}  // namespace

TEST_CASE("built-in cases") {
  const auto cases = builtin_cases();
  REQUIRE(cases.size() == 3);
  for (const auto& c : cases) CHECK_NOTHROW(c.validate());

  const auto e = builtin_case("elliptic");
  CHECK(e.chart == "ellipsoid");
  CHECK(e.lame.lambda == 8e10);
  CHECK(e.lame.mu == 8e10);
  CHECK(e.eps_list.size() == 8);
  CHECK(e.eps_list.front() == 8e-2);
  CHECK(e.eps_list.back() == 6.25e-4);

  const auto g = builtin_case("generalized");
  CHECK(g.eps_list.size() == 7);
  CHECK(g.eps_list.back() == 1e-8);
  const auto f = builtin_case("flexural");
  CHECK(f.eps_list.size() == 6);
  CHECK(f.scaling == ForceScaling::FlexuralData);

  CHECK_THROWS_AS(builtin_case("torus"), ConfigError);
}

TEST_CASE("case validation") {
  auto c = builtin_case("generalized");
  c.lame.lambda *= 1.05;  // outside the 2% band around E, nu
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = builtin_case("generalized");
  c.lame.mu *= 1.015;
  CHECK_NOTHROW(c.validate());
  c.mesh.layers = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = builtin_case("flexural");
  c.penalty = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidPenalty);
  c.penalty = std::nan("");
  CHECK_THROWS_AS(c.validate(), InvalidPenalty);
}

TEST_CASE("load scaling") {
  auto c = builtin_case("flexural");
  c.h = Vec3(0, 0, 1);
  const auto a = physical_load(c, 1e-2), b = physical_load(c, 1e-3);
  CHECK((a.f - 1e-4 * c.f).norm() < 1e-18);
  CHECK(a.f.norm() / b.f.norm() == doctest::Approx(100.0));
  CHECK(a.h_plus.norm() / b.h_plus.norm() == doctest::Approx(1000.0));
  CHECK((limit_load(c).f - c.f).norm() == 0.0);

  auto m = builtin_case("generalized");
  m.h = Vec3(1, 0, 0);
  const auto p = physical_load(m, 1e-3);
  CHECK((p.f - m.f).norm() == 0.0);
  CHECK(p.h_minus[0] == doctest::Approx(1e-3));
}

TEST_CASE("through-thickness average on a cylinder") {
  const auto c = builtin_case("generalized");
  const auto chart = c.make_chart();
  const auto base = std::make_shared<const TriMesh>(structured_tri(c.rect, 3, 3, c.boundary));
  const auto pm = std::make_shared<const PrismMesh>(extrude(*base, 2));
  const auto pts = sample_points(*chart, base, 4);
  const double eps = 0.05;

  SUBCASE("u = (1 + x3 + x3^2) g^3 averages to 4/3 a3") {
    const auto u = prism_field(pm, [](int i, const Vec2&, double x3) { return i == 2 ? 1 + x3 + x3 * x3 : 0.0; });
    const auto avg = average_through_thickness(u, *chart, eps, pts);
    for (int i = 0; i < pts.size(); ++i) {
      CHECK((avg[i].N - (4.0 / 3.0) * pts.geom[i].base[2]).norm() < 1e-12);
      CHECK(avg[i].T.norm() < 1e-12);
    }
  }

  SUBCASE("odd fields average to zero") {
    const auto u = prism_field(pm, [](int i, const Vec2& y, double x3) { return (1 + i + y[0]) * x3; });
    const auto avg = average_through_thickness(u, *chart, 0.0, pts);
    for (const auto& j : avg) {
      CHECK(j.T.norm() < 1e-12);
      CHECK(j.N.norm() < 1e-12);
    }
  }

  SUBCASE("y-derivatives match central differences of the average") {
    // u_1 = y2 + x3, u_2 = y1 x3^2, u_3 = y1: g^1, g^2 depend on x3, so the
    // Christoffel terms are exercised
    auto f = [](int i, const Vec2& y, double x3) {
      return i == 0 ? y[1] + x3 : i == 1 ? y[0] * x3 * x3 : y[0];
    };
    const auto u = prism_field(pm, f);
    const auto avg = average_through_thickness(u, *chart, eps, pts);
    // independent oracle: trapezoid rule in x3 of the Cartesian integrand
    auto oracle = [&](const Vec2& y) {
      const auto s = surface_at(*chart, y);
      Vec3 sum = Vec3::Zero();
      const int n = 4000;
      for (int k = 0; k <= n; ++k) {
        const double x3 = -1.0 + 2.0 * k / n;
        const auto g = volume_at(s, x3, eps);
        Vec3 v = Vec3::Zero();
        for (int i = 0; i < 3; ++i) v += f(i, y, x3) * g.g_dual[i];
        sum += (k == 0 || k == n ? 0.5 : 1.0) * v;
      }
      return Vec3(sum * (2.0 / n) * 0.5);
    };
    for (int i = 0; i < pts.size(); i += 11) {
      const Vec2 y = pts.y[i];
      CHECK((avg[i].T + avg[i].N - oracle(y)).norm() < 1e-6);
      for (int b = 0; b < 2; ++b) {
        const double h = 1e-5;
        Vec2 yp = y, ym = y;
        yp[b] += h;
        ym[b] -= h;
        const Vec3 fd = (oracle(yp) - oracle(ym)) / (2 * h);
        CHECK((avg[i].dT[b] + avg[i].dN[b] - fd).norm() < 1e-5 * (1 + fd.norm()));
      }
    }
  }
}

TEST_CASE("error norms") {
  const auto chart = make_chart("plane", {});
  const auto mesh = std::make_shared<const TriMesh>(structured_tri(ParamRect{}, 4, 4, BoundarySpec::entire()));
  const auto pts = sample_points(*chart, mesh);

  SUBCASE("weights integrate the rectangle") {
    double area = 0;
    for (double w : pts.w) area += w;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("identical fields and constant offsets") {
    std::vector<CartesianJet> a(pts.size()), b(pts.size());
    for (int i = 0; i < pts.size(); ++i) {
      b[i].T = Vec3(pts.y[i][0], 0, 0);
      b[i].dT[0] = Vec3(1, 0, 0);
      a[i] = b[i];
    }
    CHECK(error_norm(a, b, pts, {2}).absolute == 0.0);
    for (auto& j : a) j.N += Vec3(0, 0, 0.3);
    const auto e = error_norm(a, b, pts, {0});
    CHECK(e.absolute == doctest::Approx(0.3).epsilon(1e-13));
    // ||b||^2 = int y1^2 + 1 = 4/3
    CHECK(e.relative == doctest::Approx(0.3 / std::sqrt(4.0 / 3.0)).epsilon(1e-13));
    CHECK(ErrorNorm{1}.describe() == "T:H1+N:H1");
  }

  SUBCASE("norm of a discrete field against the exact integral") {
    // plane chart: eta_1 = y1, eta_2 = 0, eta_3 = y1^2 on the unit square.
    // T:H1 + N:H2 squared = 1/3 + 1 + 1/5 + 4/3 + 4
    const auto p2 = FunctionSpace::lagrange_tri(mesh, 2);
    const auto hct = FunctionSpace::reduced_hct(mesh);
    auto layout = std::make_shared<MixedSpace>(std::vector<SpacePtr>{p2, p2, hct});
    Eigen::VectorXd c = Eigen::VectorXd::Zero(layout->ndof());
    for (int d = 0; d < p2->ndof(); ++d) c[d] = p2->node(d)[0];
    for (int v = 0; v < mesh->num_vertices(); ++v) {
      const double y1 = mesh->vertices[v][0];
      c[layout->offset(2) + 3 * v] = y1 * y1;
      c[layout->offset(2) + 3 * v + 1] = 2 * y1;
    }
    const auto jets = sample_surface_field({layout, c}, pts);
    const double exact = 1.0 / 3 + 1 + 1.0 / 5 + 4.0 / 3 + 4;
    CHECK(field_norm(jets, pts, {2}) == doctest::Approx(std::sqrt(exact)).epsilon(1e-12));
    CHECK(field_norm(jets, pts, {0}) == doctest::Approx(std::sqrt(1.0 / 3 + 1 + 1.0 / 5)).epsilon(1e-12));

    const auto other = std::make_shared<const TriMesh>(structured_tri(ParamRect{}, 3, 3, BoundarySpec::entire()));
    CHECK_THROWS_AS(sample_surface_field({layout, c}, sample_points(*chart, other)), MeshMismatch);
  }
}

TEST_CASE("penalty extrapolation removes the 1/P term") {
  auto layout = std::make_shared<MixedSpace>(std::vector<SpacePtr>{
      FunctionSpace::lagrange_tri(std::make_shared<const TriMesh>(structured_tri(ParamRect{}, 1, 1, {})), 1)});
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(layout->ndof(), 1.0, 2.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(layout->ndof(), 5.0);
  auto at = [&](double p) { return DiscreteField{layout, a + b / p}; };
  const auto u = extrapolate_penalty(at(1e3), 1e3, at(1e5), 1e5);
  CHECK((u.coef - a).norm() < 1e-12);
}

TEST_CASE("Koiter solutions are linear in the load and split their energy") {
  auto c = tiny("generalized", {1e-2});
  const auto ops = build_operators(c);
  auto solve_for = [&](double s) {
    auto load = physical_load(c, 1e-2);
    load.f *= s;
    return solve(koiter_system(ops.koiter, 1e-2, load, *ops.koiter_layout), ops.koiter_layout, c.solver);
  };
  const auto u1 = solve_for(1.0), u3 = solve_for(3.0);
  CHECK((u3.coef - 3.0 * u1.coef).norm() < 1e-9 * u3.coef.norm());
  const auto e = energy_split(ops, u1, 1e-2);
  CHECK(e.membrane > 0);
  CHECK(e.flexural > 0);
  CHECK(e.membrane_fraction() + e.flexural_fraction() == doctest::Approx(1.0));
}

TEST_CASE("sweep on a coarse mesh") {
  std::vector<double> seen;
  RunOptions o;
  o.on_fields = [&](const RowFields& f) {
    seen.push_back(f.eps);
    CHECK(f.koiter != nullptr);
    CHECK(f.three_d != nullptr);
    CHECK(f.limit == nullptr);
  };
  const auto c = tiny("generalized", {1e-2, 1e-3});
  const auto r = run_case(c, o);
  REQUIRE(r.rows.size() == 2);
  CHECK(seen == std::vector<double>{1e-2, 1e-3});
  CHECK(r.limit_method == "none");
  for (const auto& row : r.rows) {
    CHECK(row.status == "ok");
    CHECK(!row.err_lk);
    CHECK(row.err_3dk);
    CHECK(row.ndof_3d > 0);
    CHECK(!row.beyond_focal);
  }

  SUBCASE("CSV is deterministic and round-trips") {
    const std::string csv = export_table(r);
    CHECK(csv == export_table(run_case(c)));
    const auto back = parse_table(csv);
    REQUIRE(back.size() == 2);
    for (int i = 0; i < 2; ++i) {
      CHECK(back[i].eps == r.rows[i].eps);
      CHECK(back[i].err_3dk->relative == r.rows[i].err_3dk->relative);
      CHECK(back[i].err_3dk->absolute == r.rows[i].err_3dk->absolute);
      CHECK(!back[i].err_lk);
      CHECK(back[i].max_residual == r.rows[i].max_residual);
      CHECK(back[i].ndof_koiter == r.rows[i].ndof_koiter);
    }
  }

  SUBCASE("beyond the focal surface the row reports and the sweep continues") {
    auto f = tiny("generalized", {0.3, 1e-2});
    const auto rr = run_case(f);
    CHECK(rr.rows[0].beyond_focal);
    CHECK(rr.rows[0].status.rfind("ThicknessExceedsCurvature", 0) == 0);
    CHECK(rr.rows[1].status == "ok");
  }
}

TEST_CASE("flexural sweep reports the penalty study") {
  const auto r = run_case(tiny("flexural", {5.02655e-2}));
  REQUIRE(r.penalties.size() == 2);
  CHECK(r.penalties[1] == doctest::Approx(100 * r.penalties[0]));
  CHECK(r.penalty_energies[0] > 0);
  CHECK(r.rows[0].err_lk);
  CHECK(r.rows[0].norm_lk == "T:H1+N:H2");
  CHECK(r.limit_method.find("extrapolated") != std::string::npos);
}

TEST_CASE("CSV edge cases") {
  CaseResult empty;
  empty.shell = builtin_case("elliptic");
  CHECK(export_table(empty) == table_header());
  CHECK(parse_table(table_header()).empty());
  CHECK_THROWS_AS(parse_table("eps,err\n"), IoError);

  CaseResult r;
  r.shell = builtin_case("elliptic");
  r.limit_method = "a, \"quoted\" method";
  ResultRow row;
  row.eps = 0.1;
  row.status = "SingularSystem: x, y";
  r.rows.push_back(row);
  const auto back = parse_table(export_table(r));
  REQUIRE(back.size() == 1);
  CHECK(back[0].status == row.status);
  CHECK(!back[0].err_3dk);
}

TEST_CASE("VTK export") {
  const auto chart = make_chart("plane", {});
  const TriMesh mesh = structured_tri(ParamRect{}, 1, 1, BoundarySpec::entire());
  const std::vector<Vec3> u(4, Vec3(0, 0, 0.5));
  const std::string vtk = export_vtk(mesh, *chart, u, "test");
  CHECK(vtk.rfind("# vtk DataFile Version 3.0\ntest\nASCII\nDATASET UNSTRUCTURED_GRID\n", 0) == 0);
  CHECK(vtk.find("POINTS 4 double") != std::string::npos);
  CHECK(vtk.find("CELLS 2 8") != std::string::npos);
  CHECK(vtk.find("CELL_TYPES 2") != std::string::npos);
  CHECK(vtk.find("POINT_DATA 4\nVECTORS displacement double") != std::string::npos);
  CHECK(vtk.find("0.000000000e+00 0.000000000e+00 5.000000000e-01") != std::string::npos);
  CHECK_THROWS_AS(export_vtk(mesh, *chart, std::vector<Vec3>(3), "bad"), MeshMismatch);
}
