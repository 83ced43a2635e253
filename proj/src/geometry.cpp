#include "koiter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "koiter/errors.hpp"

namespace koiter {

double ParamRect::diagonal() const { return std::hypot(width(), height()); }

bool ParamRect::contains(const Vec2& y, double tol) const {
  return y[0] >= y1min - tol && y[0] <= y1max + tol && y[1] >= y2min - tol && y[1] <= y2max + tol;
}

ChartJet Chart::jet(const Vec2& y) const {
  ChartJet j;
  j.x = partial(y, 0, 0);
  // counts[a] tallies how many times each direction appears in a multi-index
  auto part = [&](std::initializer_list<int> dirs) {
    int c[2] = {0, 0};
    for (int d : dirs) ++c[d];
    return partial(y, c[0], c[1]);
  };
  for (int a = 0; a < 2; ++a) {
    j.d1[a] = part({a});
    for (int b = 0; b < 2; ++b) {
      j.d2[a][b] = part({a, b});
      for (int c = 0; c < 2; ++c) j.d3[a][b][c] = part({a, b, c});
    }
  }
  return j;
}

namespace {

// k-th derivative of sin and cos
double dsin(double t, int k) { return std::sin(t + 0.5 * k * std::numbers::pi); }
double dcos(double t, int k) { return std::cos(t + 0.5 * k * std::numbers::pi); }

// k-th derivative of the identity t -> t
double dlin(double t, int k) { return k == 0 ? t : (k == 1 ? 1.0 : 0.0); }

}  // namespace

PlaneChart::PlaneChart(ParamRect rect) : Chart("plane", rect) {}

Vec3 PlaneChart::partial(const Vec2& y, int i, int j) const {
  return {dlin(y[0], i) * (j == 0 ? 1.0 : 0.0), dlin(y[1], j) * (i == 0 ? 1.0 : 0.0), 0.0};
}

EllipsoidChart::EllipsoidChart(double m, double n, double l, ParamRect rect)
    : Chart("ellipsoid", rect), m_(m), n_(n), l_(l) {}

Vec3 EllipsoidChart::partial(const Vec2& y, int i, int j) const {
  return {m_ * dsin(y[0], i) * dcos(y[1], j), n_ * dsin(y[0], i) * dsin(y[1], j),
          j == 0 ? l_ * dcos(y[0], i) : 0.0};
}

CylinderChart::CylinderChart(double r, double h, ParamRect rect)
    : Chart("cylinder", rect), r_(r), h_(h) {}

Vec3 CylinderChart::partial(const Vec2& y, int i, int j) const {
  if (i > 0 && j > 0) return Vec3::Zero();
  const double z = i == 0 ? h_ * dlin(y[1], j) : 0.0;
  if (j > 0) return {0.0, 0.0, z};
  return {r_ * dcos(y[0], i), r_ * dsin(y[0], i), z};
}

ConeChart::ConeChart(double b, double c, ParamRect rect) : Chart("cone", rect), b_(b), c_(c) {}

Vec3 ConeChart::partial(const Vec2& y, int i, int j) const {
  const double s = dlin(y[1], j);
  return {b_ * s * dcos(y[0], i), b_ * s * dsin(y[0], i), i == 0 ? c_ * s : 0.0};
}

FunctionChart::FunctionChart(std::string name, ParamRect rect, std::function<Vec3(const Vec2&)> fn)
    : Chart(std::move(name), rect), fn_(std::move(fn)) {}

Vec3 FunctionChart::diff(const Vec2& y, int i, int j, double h) const {
  if (i == 0 && j == 0) return fn_(y);
  // peel one derivative off and difference the lower-order partial
  const Vec2 e = i > 0 ? Vec2(h, 0.0) : Vec2(0.0, h);
  const int i1 = i > 0 ? i - 1 : i;
  const int j1 = i > 0 ? j : j - 1;
  return (diff(y + e, i1, j1, h) - diff(y - e, i1, j1, h)) / (2.0 * h);
}

Vec3 FunctionChart::partial(const Vec2& y, int i, int j) const {
  static constexpr double kStepFactor[4] = {0.0, 1e-5, 1e-4, 1e-3};
  return diff(y, i, j, kStepFactor[i + j] * rect().diagonal());
}

ChartPtr make_chart(const std::string& name, const std::map<std::string, double>& params) {
  using std::numbers::pi;
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto rect_with = [&](ParamRect r) {
    r.y1min = get("y1min", r.y1min);
    r.y1max = get("y1max", r.y1max);
    r.y2min = get("y2min", r.y2min);
    r.y2max = get("y2max", r.y2max);
    if (!(r.y1max > r.y1min) || !(r.y2max > r.y2min))
      throw ConfigError("empty parameter rectangle for chart '" + name + "'");
    return r;
  };
  if (name == "plane") return std::make_shared<PlaneChart>(rect_with({0.0, 1.0, 0.0, 1.0}));
  if (name == "ellipsoid")
    return std::make_shared<EllipsoidChart>(get("m", 0.06), get("n", 0.05), get("l", 0.03),
                                            rect_with({pi / 6, 5 * pi / 6, 0.0, pi}));
  if (name == "cylinder")
    return std::make_shared<CylinderChart>(get("r", 0.2), get("h", 0.4),
                                           rect_with({0.0, pi, 0.0, 1.0}));
  if (name == "cone")
    return std::make_shared<ConeChart>(get("b", 0.2), get("c", 0.4),
                                       rect_with({0.0, pi, 0.4, 1.0}));
  throw ConfigError("unknown chart '" + name + "'");
}

SurfaceGeometry surface_at(const Chart& chart, const Vec2& y) {
  SurfaceGeometry g;
  g.y = y;
  g.jet = chart.jet(y);
  const auto& d1 = g.jet.d1;
  const auto& d2 = g.jet.d2;
  const auto& d3 = g.jet.d3;

  const Vec3 n = d1[0].cross(d1[1]);
  const double nn = n.norm();
  if (!(nn >= kDegeneracyTol))
    throw DegenerateChart("|a_1 x a_2| = " + std::to_string(nn) + " at y = (" +
                          std::to_string(y[0]) + ", " + std::to_string(y[1]) + ")");
  const Vec3 a3 = n / nn;
  g.base = {d1[0], d1[1], a3};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.a_cov(a, b) = d1[a].dot(d1[b]);
  g.a_con = g.a_cov.inverse();
  g.sqrt_a = nn;
  for (int a = 0; a < 2; ++a) g.dual[a] = g.a_con(a, 0) * d1[0] + g.a_con(a, 1) * d1[1];
  g.dual[2] = a3;

  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.b_cov(a, b) = d2[a][b].dot(a3);
  // b_a^s = a^{s m} b_{a m}
  g.b_mix = g.b_cov * g.a_con;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g.christoffel[s](a, b) = d2[a][b].dot(g.dual[s]);
  g.kappa = g.b_cov.determinant() / g.a_cov.determinant();

  // Weingarten: d_a a_3 = -b_a^s a_s
  for (int a = 0; a < 2; ++a) g.d_a3[a] = -(g.b_mix(a, 0) * d1[0] + g.b_mix(a, 1) * d1[1]);

  std::array<Mat2, 2> d_acon;
  for (int a = 0; a < 2; ++a) {
    Mat2 d_acov, d_bcov;
    for (int m = 0; m < 2; ++m)
      for (int k = 0; k < 2; ++k) {
        d_acov(m, k) = d2[a][m].dot(d1[k]) + d1[m].dot(d2[a][k]);
        d_bcov(m, k) = d3[a][m][k].dot(a3) + d2[m][k].dot(g.d_a3[a]);
      }
    d_acon[a] = -g.a_con * d_acov * g.a_con;
    // d_a b_b^t = d_a a^{t m} b_{b m} + a^{t m} d_a b_{b m}
    g.db_mix[a] = g.b_cov * d_acon[a] + d_bcov * g.a_con;
    for (int b = 0; b < 2; ++b)
      g.d_dual[a][b] = d_acon[a](b, 0) * d1[0] + d_acon[a](b, 1) * d1[1] +
                       g.a_con(b, 0) * d2[a][0] + g.a_con(b, 1) * d2[a][1];
  }
  // d_b d_a a_3 = -(d_b b_a^s) a_s - b_a^s d_b a_s, symmetrized
  std::array<std::array<Vec3, 2>, 2> raw;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Vec3 v = Vec3::Zero();
      for (int s = 0; s < 2; ++s) v -= g.db_mix[b](a, s) * d1[s] + g.b_mix(a, s) * d2[b][s];
      raw[a][b] = v;
    }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.dd_a3[a][b] = 0.5 * (raw[a][b] + raw[b][a]);
  return g;
}

VolumeGeometry volume_at(const SurfaceGeometry& s, double x3, double eps) {
  VolumeGeometry v;
  v.x3 = x3;
  v.eps = eps;
  const double t = eps * x3;
  const auto& d2 = s.jet.d2;
  v.g_base = {s.base[0] + t * s.d_a3[0], s.base[1] + t * s.d_a3[1], s.base[2]};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v.g_cov(i, j) = v.g_base[i].dot(v.g_base[j]);
  const double det = v.g_cov.determinant();
  const double ref = s.a_cov.determinant();
  Eigen::LLT<Mat3> llt(v.g_cov);
  if (llt.info() != Eigen::Success || !(det > 1e-12 * ref))
    throw ThicknessExceedsCurvature("g(eps) is not positive definite at x3 = " +
                                    std::to_string(x3) + ", eps = " + std::to_string(eps));
  v.g_con = v.g_cov.inverse();
  v.sqrt_g = std::sqrt(det);
  v.orientation_preserved = v.g_base[0].cross(v.g_base[1]).dot(v.g_base[2]) > 0.0;
  for (int i = 0; i < 3; ++i)
    v.g_dual[i] = v.g_con(i, 0) * v.g_base[0] + v.g_con(i, 1) * v.g_base[1] + v.g_con(i, 2) * v.g_base[2];

  // d_i g_j with d_3 = d / dx3^eps
  std::array<std::array<Vec3, 3>, 3> dg;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) dg[a][b] = d2[a][b] + t * s.dd_a3[a][b];
    dg[a][2] = s.d_a3[a];
    dg[2][a] = s.d_a3[a];
  }
  dg[2][2] = Vec3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v.christoffel3[p](i, j) = dg[i][j].dot(v.g_dual[p]);
  return v;
}

VolumeGeometry volume_at(const Chart& chart, const Vec2& y, double x3, double eps) {
  return volume_at(surface_at(chart, y), x3, eps);
}

std::array<double, 2> principal_curvatures(const SurfaceGeometry& g) {
  const double h = 0.5 * g.b_mix.trace();
  const double disc = std::sqrt(std::max(0.0, h * h - g.b_mix.determinant()));
  return {h - disc, h + disc};
}

double min_curvature_radius(const Chart& chart, int samples) {
  const auto& r = chart.rect();
  double kmax = 0.0;
  for (int i = 0; i <= samples; ++i)
    for (int j = 0; j <= samples; ++j) {
      const Vec2 y(r.y1min + r.width() * i / samples, r.y2min + r.height() * j / samples);
      const auto k = principal_curvatures(surface_at(chart, y));
      kmax = std::max({kmax, std::abs(k[0]), std::abs(k[1])});
    }
  return kmax > 0.0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();
}

}  // namespace koiter
