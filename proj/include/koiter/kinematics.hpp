#pragma once

#include <array>
#include <optional>

#include "koiter/geometry.hpp"

namespace koiter {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Lame {
  double lambda = 0.0;
  double mu = 0.0;

  static Lame from_young_poisson(double young, double poisson);
};

/// Covariant components eta_i of a surface displacement eta_i a^i and the
/// derivatives the strain measures consume. d_eta[i][b] = d_b eta_i.
struct SurfaceDisplacementJet {
  Vec3 eta = Vec3::Zero();
  std::array<Vec2, 3> d_eta{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::optional<Mat2> dd_eta3;
};

/// Covariant components v_i of v_i g^i(eps) on the scaled domain.
/// d_v(i, j) = d_j v_i, with d_3 taken with respect to x3 in [-1, 1].
struct VolumeDisplacementJet {
  Vec3 v = Vec3::Zero();
  Mat3 d_v = Mat3::Zero();
};

/// Contravariant a^{abst} of the two-dimensional elasticity tensor.
struct ElasticityTensor2D {
  std::array<double, 16> a4{};
  Lame lame;

  double operator()(int a, int b, int s, int t) const { return a4[((a * 2 + b) * 2 + s) * 2 + t]; }
  double& operator()(int a, int b, int s, int t) { return a4[((a * 2 + b) * 2 + s) * 2 + t]; }
  /// 3x3 matrix acting on (g11, g22, 2 g12).
  Mat3 voigt() const;
};

/// Contravariant A^{ijkl}(eps) of the three-dimensional elasticity tensor.
struct ElasticityTensor3D {
  std::array<double, 81> A4{};
  Lame lame;

  double operator()(int i, int j, int k, int l) const { return A4[((i * 3 + j) * 3 + k) * 3 + l]; }
  double& operator()(int i, int j, int k, int l) { return A4[((i * 3 + j) * 3 + k) * 3 + l]; }
  /// 6x6 matrix acting on (e11, e22, e33, 2 e23, 2 e13, 2 e12).
  Mat6 voigt() const;
};

/// Linearized change of metric gamma_ab(eta).
Mat2 gamma(const SurfaceGeometry& geom, const SurfaceDisplacementJet& jet);

/// Linearized change of curvature rho_ab(eta). Throws MissingSecondDerivatives
/// when the jet carries no d_ab eta_3.
Mat2 rho(const SurfaceGeometry& geom, const SurfaceDisplacementJet& jet);

/// Scaled linearized strains e_{i||j}(eps; v). Throws ZeroThickness for eps <= 0.
Mat3 strain3_scaled(const VolumeGeometry& vol, const VolumeDisplacementJet& jet, double eps);

ElasticityTensor2D tensor2d(const SurfaceGeometry& geom, Lame lame);
ElasticityTensor3D tensor3d(const VolumeGeometry& vol, Lame lame);

/// Voigt helpers with engineering shear.
Vec3 voigt2(const Mat2& e);
Vec6 voigt3(const Mat3& e);

}  // namespace koiter
