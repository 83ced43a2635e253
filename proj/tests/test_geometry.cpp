#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "koiter/errors.hpp"
#include "koiter/geometry.hpp"
#include "test_support.hpp"

using namespace koiter;
using std::numbers::pi;

namespace {

std::vector<ChartPtr> builtin_charts() {
  return {make_chart("plane", {}), make_chart("ellipsoid", {}), make_chart("cylinder", {}),
          make_chart("cone", {})};
}

// Central difference of the next-lower analytic partial.
Vec3 fd_partial(const Chart& c, const Vec2& y, int i, int j, double h) {
  if (i > 0) {
    const Vec2 e(h, 0.0);
    return (c.partial(y + e, i - 1, j) - c.partial(y - e, i - 1, j)) / (2 * h);
  }
  const Vec2 e(0.0, h);
  return (c.partial(y + e, i, j - 1) - c.partial(y - e, i, j - 1)) / (2 * h);
}

// Gaussian curvature of x^2/m^2 + y^2/n^2 + z^2/l^2 = 1 from the implicit form.
double ellipsoid_kappa(const Vec3& p, double m, double n, double l) {
  const double s = p[0] * p[0] / std::pow(m, 4) + p[1] * p[1] / std::pow(n, 4) + p[2] * p[2] / std::pow(l, 4);
  return 1.0 / (m * m * n * n * l * l * s * s);
}

}  // namespace

TEST_CASE("analytic partials match central differences") {
  std::mt19937_64 rng(11);
  for (const auto& chart : builtin_charts()) {
    CAPTURE(chart->name());
    const double h = 1e-5 * chart->rect().diagonal();
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec2 y = test::random_point(chart->rect(), rng);
      for (int order = 1; order <= 3; ++order) {
        double scale = 0.0;
        for (int i = 0; i <= order; ++i) scale = std::max(scale, chart->partial(y, i, order - i).norm());
        for (int i = 0; i <= order; ++i) {
          const Vec3 an = chart->partial(y, i, order - i);
          const Vec3 fd = fd_partial(*chart, y, i, order - i, h);
          worst = std::max(worst, (an - fd).norm() / std::max(an.norm(), scale));
        }
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("plane chart identities") {
  PlaneChart plane;
  const auto g = surface_at(plane, {0.3, 0.7});
  CHECK(test::max_abs(g.a_cov - Mat2::Identity()) == 0.0);
  CHECK(test::max_abs(g.b_cov) == 0.0);
  CHECK(test::max_abs(g.christoffel[0]) == 0.0);
  CHECK(test::max_abs(g.christoffel[1]) == 0.0);
  CHECK(g.kappa == 0.0);
  for (double eps : {1e-3, 0.5, 3.0})
    for (double x3 : {-1.0, 0.0, 0.4, 1.0}) {
      const auto v = volume_at(plane, {0.3, 0.7}, x3, eps);
      CHECK(test::max_abs(v.g_cov - Mat3::Identity()) == 0.0);
      for (int p = 0; p < 3; ++p) CHECK(test::max_abs(v.christoffel3[p]) == 0.0);
    }
}

TEST_CASE("cylinder metric") {
  auto cyl = make_chart("cylinder", {});
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto g = surface_at(*cyl, test::random_point(cyl->rect(), rng));
    CHECK(g.a_cov(0, 0) == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(g.a_cov(1, 1) == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(std::abs(g.a_cov(0, 1)) < 1e-16);
    CHECK(std::abs(g.kappa) < 1e-10);
  }
}

TEST_CASE("ellipsoid curvature against the implicit-surface formula") {
  auto ell = make_chart("ellipsoid", {});
  const auto g0 = surface_at(*ell, {pi / 2, 0.0});
  // at (m, 0, 0): kappa = m^2 / (n^2 l^2)
  CHECK(g0.kappa == doctest::Approx(0.06 * 0.06 / (0.05 * 0.05 * 0.03 * 0.03)).epsilon(1e-12));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vec2 y = test::random_point(ell->rect(), rng, 0.0);
    const auto g = surface_at(*ell, y);
    CHECK(g.kappa > 0.0);
    CHECK(g.kappa == doctest::Approx(ellipsoid_kappa(g.jet.x, 0.06, 0.05, 0.03)).epsilon(1e-10));
  }
}

TEST_CASE("surface invariants on all charts") {
  std::mt19937_64 rng(7);
  for (const auto& chart : builtin_charts()) {
    CAPTURE(chart->name());
    for (int k = 0; k < 100; ++k) {
      const auto g = surface_at(*chart, test::random_point(chart->rect(), rng));
      CHECK(g.a_cov.determinant() * g.a_con.determinant() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(g.a_cov(0, 1) - g.a_cov(1, 0)) == 0.0);
      CHECK(std::abs(g.b_cov(0, 1) - g.b_cov(1, 0)) <= 1e-15 * g.b_cov.norm());
      for (int s = 0; s < 2; ++s)
        CHECK(std::abs(g.christoffel[s](0, 1) - g.christoffel[s](1, 0)) <= 1e-14 * (1 + g.christoffel[s].norm()));
      const double ref = std::max(1.0, std::abs(g.kappa));
      CHECK(std::abs(g.b_mix.determinant() - g.kappa) <= 1e-10 * ref);
      for (int a = 0; a < 2; ++a) {
        const Vec3 lowered = g.a_cov(a, 0) * g.dual[0] + g.a_cov(a, 1) * g.dual[1];
        CHECK((lowered - g.base[a]).norm() <= 1e-12 * g.base[a].norm());
        for (int b = 0; b < 2; ++b) CHECK(std::abs(g.dual[a].dot(g.base[b]) - (a == b)) < 1e-12);
      }
      CHECK(std::abs(g.base[2].norm() - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("frame derivatives against finite differences") {
  std::mt19937_64 rng(13);
  for (const auto& chart : builtin_charts()) {
    CAPTURE(chart->name());
    const double h = 1e-6 * chart->rect().diagonal();
    for (int k = 0; k < 20; ++k) {
      const Vec2 y = test::random_point(chart->rect(), rng, 0.05);
      const auto g = surface_at(*chart, y);
      for (int a = 0; a < 2; ++a) {
        const Vec2 e = a == 0 ? Vec2(h, 0) : Vec2(0, h);
        const auto gp = surface_at(*chart, y + e);
        const auto gm = surface_at(*chart, y - e);
        const double sc = 1.0 + g.b_mix.norm();
        CHECK((g.d_a3[a] - (gp.base[2] - gm.base[2]) / (2 * h)).norm() < 1e-6 * sc);
        const Mat2 db = (gp.b_mix - gm.b_mix) / (2 * h);
        // b_mix(b, t) = b_b^t
        CHECK(test::max_abs(g.db_mix[a] - db) < 1e-6 * (1.0 + db.norm() + g.b_mix.norm()));
        for (int b = 0; b < 2; ++b) {
          CHECK((g.d_dual[a][b] - (gp.dual[b] - gm.dual[b]) / (2 * h)).norm() < 1e-6 * (1.0 + g.dual[b].norm()));
          CHECK((g.dd_a3[a][b] - (gp.d_a3[b] - gm.d_a3[b]) / (2 * h)).norm() < 1e-5 * (1.0 + g.dd_a3[a][b].norm()));
        }
      }
    }
  }
}

TEST_CASE("volume geometry: vanishing Christoffel symbols and metric") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux3(-1.0, 1.0);
  for (const auto& chart : builtin_charts()) {
    CAPTURE(chart->name());
    const double eps = std::min(0.5, 0.5 * min_curvature_radius(*chart, 32));
    for (int k = 0; k < 100; ++k) {
      const Vec2 y = test::random_point(chart->rect(), rng);
      const double x3 = ux3(rng);
      const auto v = volume_at(*chart, y, x3, eps);
      for (int a = 0; a < 2; ++a) CHECK(std::abs(v.christoffel3[2](a, 2)) < 1e-12);
      for (int p = 0; p < 3; ++p) CHECK(std::abs(v.christoffel3[p](2, 2)) < 1e-12);
      CHECK(test::max_abs(v.g_cov * v.g_con - Mat3::Identity()) < 1e-10);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(v.g_dual[i].dot(v.g_base[j]) - (i == j)) < 1e-10);
    }
  }
}

TEST_CASE("metric tends to block(a, 1) at zero thickness") {
  auto cone = make_chart("cone", {});
  const Vec2 y(1.0, 0.7);
  const auto s = surface_at(*cone, y);
  Mat3 limit = Mat3::Identity();
  limit.topLeftCorner<2, 2>() = s.a_cov;
  double prev = 1e300;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double d = test::max_abs(volume_at(s, 1.0, eps).g_cov - limit);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("cylinder volume element against a brute-force Jacobian") {
  auto cyl = make_chart("cylinder", {});
  const Vec2 y(0.0, 0.5);
  const double eps = 0.01, x3 = 1.0;
  // Theta(y1, y2, t) = theta(y) + t a3(y); a3 from a finite-difference normal
  auto normal = [&](const Vec2& q) {
    const double h = 1e-6;
    const Vec3 d1 = (cyl->map(q + Vec2(h, 0)) - cyl->map(q - Vec2(h, 0))) / (2 * h);
    const Vec3 d2 = (cyl->map(q + Vec2(0, h)) - cyl->map(q - Vec2(0, h))) / (2 * h);
    return Vec3(d1.cross(d2).normalized());
  };
  auto Theta = [&](const Vec3& x) { return Vec3(cyl->map(x.head<2>()) + x[2] * normal(x.head<2>())); };
  const Vec3 x(y[0], y[1], eps * x3);
  Mat3 J;
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    J.col(i) = (Theta(x + e) - Theta(x - e)) / (2 * h);
  }
  const auto v = volume_at(*cyl, y, x3, eps);
  CHECK(v.sqrt_g == doctest::Approx(std::abs(J.determinant())).epsilon(1e-7));
  // closed form: r h (1 + t / r) with the outward normal
  CHECK(v.sqrt_g == doctest::Approx(0.2 * 0.4 * (1.0 + 0.01 / 0.2)).epsilon(1e-12));
}

TEST_CASE("thickness at the focal distance is rejected") {
  auto cyl = make_chart("cylinder", {});
  // inward normal side x3 = -1 collapses the shell at eps = r
  CHECK(volume_at(*cyl, {0.5, 0.5}, -1.0, 0.19).orientation_preserved);
  CHECK_THROWS_AS(volume_at(*cyl, {0.5, 0.5}, -1.0, 0.2), ThicknessExceedsCurvature);
  // past the focal surface the metric is positive definite again, reflected
  const auto past = volume_at(*cyl, {0.5, 0.5}, -1.0, 0.3);
  CHECK_FALSE(past.orientation_preserved);
  CHECK(volume_at(*cyl, {0.5, 0.5}, 1.0, 0.3).orientation_preserved);
}

TEST_CASE("function charts") {
  ParamRect rect{pi / 6, 5 * pi / 6, 0.0, pi};
  FunctionChart fc("ellipsoid-fd", rect, [](const Vec2& y) {
    return Vec3(0.06 * std::sin(y[0]) * std::cos(y[1]), 0.05 * std::sin(y[0]) * std::sin(y[1]),
                0.03 * std::cos(y[0]));
  });
  auto ell = make_chart("ellipsoid", {});
  const Vec2 y(1.1, 0.9);
  const auto a = surface_at(fc, y);
  const auto b = surface_at(*ell, y);
  CHECK(test::max_abs(a.a_cov - b.a_cov) < 1e-9);
  CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-5));
  CHECK(test::max_abs(a.db_mix[0] - b.db_mix[0]) < 1e-2 * (1 + b.db_mix[0].norm()));

  FunctionChart degenerate("line", {}, [](const Vec2& q) { return Vec3(q[0], 0.0, 0.0); });
  CHECK_THROWS_AS(surface_at(degenerate, {0.5, 0.5}), DegenerateChart);
}

TEST_CASE("chart factory") {
  CHECK(make_chart("cone", {})->rect() == ParamRect{0.0, pi, 0.4, 1.0});
  CHECK(make_chart("cylinder", {{"y2max", 2.0}})->rect().y2max == 2.0);
  CHECK_THROWS_AS(make_chart("torus", {}), ConfigError);
  CHECK_THROWS_AS(make_chart("plane", {{"y1max", -1.0}}), ConfigError);
  // ellipsoid: smallest radius of curvature is l^2 / m at the equator ends
  CHECK(min_curvature_radius(*make_chart("ellipsoid", {}), 64) == doctest::Approx(0.03 * 0.03 / 0.06).epsilon(0.05));
  CHECK(std::isinf(min_curvature_radius(PlaneChart{}, 4)));
}
