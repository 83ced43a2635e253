#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include <Eigen/Dense>

namespace koiter {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Parameter rectangle (y1min, y1max) x (y2min, y2max) of a chart.
struct ParamRect {
  double y1min = 0.0, y1max = 1.0, y2min = 0.0, y2max = 1.0;

  double width() const { return y1max - y1min; }
  double height() const { return y2max - y2min; }
  double area() const { return width() * height(); }
  double diagonal() const;
  bool contains(const Vec2& y, double tol = 1e-12) const;
  bool operator==(const ParamRect&) const = default;
};

/// theta and all its partial derivatives through third order at one point.
/// d2[a][b] = d_a d_b theta, d3[a][b][c] = d_a d_b d_c theta.
struct ChartJet {
  Vec3 x = Vec3::Zero();
  std::array<Vec3, 2> d1{};
  std::array<std::array<Vec3, 2>, 2> d2{};
  std::array<std::array<std::array<Vec3, 2>, 2>, 2> d3{};
};

/// Parametrization theta : omega -> E^3 of a middle surface.
///
/// Implementations provide `partial(y, i, j)` = d1^i d2^j theta(y) for
/// i + j <= 3; `jet` gathers them.
class Chart {
 public:
  Chart(std::string name, ParamRect rect) : name_(std::move(name)), rect_(rect) {}
  virtual ~Chart() = default;

  const std::string& name() const { return name_; }
  const ParamRect& rect() const { return rect_; }

  Vec3 map(const Vec2& y) const { return partial(y, 0, 0); }
  virtual Vec3 partial(const Vec2& y, int i, int j) const = 0;
  ChartJet jet(const Vec2& y) const;

 private:
  std::string name_;
  ParamRect rect_;
};

using ChartPtr = std::shared_ptr<const Chart>;

class PlaneChart final : public Chart {
 public:
  explicit PlaneChart(ParamRect rect = {});
  Vec3 partial(const Vec2& y, int i, int j) const override;
};

/// (m sin y1 cos y2, n sin y1 sin y2, l cos y1)
class EllipsoidChart final : public Chart {
 public:
  EllipsoidChart(double m, double n, double l, ParamRect rect);
  Vec3 partial(const Vec2& y, int i, int j) const override;

 private:
  double m_, n_, l_;
};

/// (r cos y1, r sin y1, h y2)
class CylinderChart final : public Chart {
 public:
  CylinderChart(double r, double h, ParamRect rect);
  Vec3 partial(const Vec2& y, int i, int j) const override;

 private:
  double r_, h_;
};

/// (b y2 cos y1, b y2 sin y1, c y2)
class ConeChart final : public Chart {
 public:
  ConeChart(double b, double c, ParamRect rect);
  Vec3 partial(const Vec2& y, int i, int j) const override;

 private:
  double b_, c_;
};

/// A chart given only by its map. Partials come from central differences;
/// first derivatives use the step 1e-5 * (rect diagonal), higher orders use
/// progressively larger steps to stay clear of cancellation.
class FunctionChart final : public Chart {
 public:
  FunctionChart(std::string name, ParamRect rect, std::function<Vec3(const Vec2&)> fn);
  Vec3 partial(const Vec2& y, int i, int j) const override;

 private:
  Vec3 diff(const Vec2& y, int i, int j, double h) const;
  std::function<Vec3(const Vec2&)> fn_;
};

/// Builds a built-in chart ("plane", "ellipsoid", "cylinder", "cone") from a
/// parameter map. Missing parameters take the defaults of the built-in cases;
/// rect keys are y1min, y1max, y2min, y2max. Throws ConfigError.
ChartPtr make_chart(const std::string& name, const std::map<std::string, double>& params);

/// Differential geometry of the middle surface at one point.
///
/// Index conventions: `b_mix(a, s)` = b_a^s; `christoffel[s](a, b)` =
/// Gamma^s_ab; `db_mix[a](b, t)` = d_a b_b^t.
struct SurfaceGeometry {
  Vec2 y = Vec2::Zero();
  ChartJet jet;
  Mat2 a_cov = Mat2::Zero();
  Mat2 a_con = Mat2::Zero();
  double sqrt_a = 0.0;
  std::array<Vec3, 3> base{};  // a_1, a_2, a_3
  std::array<Vec3, 3> dual{};  // a^1, a^2, a^3
  Mat2 b_cov = Mat2::Zero();
  Mat2 b_mix = Mat2::Zero();
  std::array<Mat2, 2> db_mix{};
  std::array<Mat2, 2> christoffel{};
  double kappa = 0.0;

  // Derivatives of the frames, used by the through-thickness geometry and
  // by Sobolev norms of Cartesian fields.
  std::array<Vec3, 2> d_a3{};                      // d_a a_3
  std::array<std::array<Vec3, 2>, 2> dd_a3{};      // d_a d_b a_3
  std::array<std::array<Vec3, 2>, 2> d_dual{};     // d_dual[a][b] = d_a a^b
};

/// Geometry of Theta = theta + x3^eps a_3 at (y, x3^eps = eps * x3).
/// `christoffel3[p](i, j)` = Gamma^p_ij(eps), derivatives taken with respect
/// to the physical coordinates x^eps.
struct VolumeGeometry {
  double x3 = 0.0;
  double eps = 0.0;
  Mat3 g_cov = Mat3::Zero();
  Mat3 g_con = Mat3::Zero();
  double sqrt_g = 0.0;
  // det(g_1, g_2, g_3) > 0. Past the focal distance the Gram matrix is
  // positive definite again but the frame is reflected.
  bool orientation_preserved = true;
  std::array<Vec3, 3> g_base{};
  std::array<Vec3, 3> g_dual{};
  std::array<Mat3, 3> christoffel3{};
};

/// Tolerance on |a_1 x a_2| below which a chart is considered degenerate.
inline constexpr double kDegeneracyTol = 1e-12;

SurfaceGeometry surface_at(const Chart& chart, const Vec2& y);

/// Throws ThicknessExceedsCurvature when g_cov is not positive definite.
VolumeGeometry volume_at(const SurfaceGeometry& surface, double x3, double eps);
VolumeGeometry volume_at(const Chart& chart, const Vec2& y, double x3, double eps);

/// Principal curvatures (eigenvalues of b_a^b) at a point.
std::array<double, 2> principal_curvatures(const SurfaceGeometry& g);

/// Smallest radius of curvature over an n x n sample grid of the rectangle
/// (infinity for flat charts). A shell of half-thickness eps folds over
/// itself when eps exceeds this value.
double min_curvature_radius(const Chart& chart, int samples = 64);

}  // namespace koiter
