#include "koiter/kinematics.hpp"

#include "koiter/errors.hpp"

namespace koiter {

namespace {

void check_lame(Lame l) {
  if (!(l.mu > 0.0) || !(l.lambda >= 0.0))
    throw InvalidLame("lambda = " + std::to_string(l.lambda) + ", mu = " + std::to_string(l.mu));
}

constexpr int kPair2[3][2] = {{0, 0}, {1, 1}, {0, 1}};
constexpr int kPair3[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};

}  // namespace

Lame Lame::from_young_poisson(double young, double poisson) {
  return {young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)), young / (2.0 * (1.0 + poisson))};
}

Mat3 ElasticityTensor2D::voigt() const {
  Mat3 c;
  for (int I = 0; I < 3; ++I)
    for (int J = 0; J < 3; ++J) c(I, J) = (*this)(kPair2[I][0], kPair2[I][1], kPair2[J][0], kPair2[J][1]);
  return c;
}

Mat6 ElasticityTensor3D::voigt() const {
  Mat6 c;
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J) c(I, J) = (*this)(kPair3[I][0], kPair3[I][1], kPair3[J][0], kPair3[J][1]);
  return c;
}

Vec3 voigt2(const Mat2& e) { return {e(0, 0), e(1, 1), e(0, 1) + e(1, 0)}; }

Vec6 voigt3(const Mat3& e) {
  Vec6 v;
  v << e(0, 0), e(1, 1), e(2, 2), e(1, 2) + e(2, 1), e(0, 2) + e(2, 0), e(0, 1) + e(1, 0);
  return v;
}

Mat2 gamma(const SurfaceGeometry& g, const SurfaceDisplacementJet& j) {
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double v = 0.5 * (j.d_eta[a][b] + j.d_eta[b][a]) - g.b_cov(a, b) * j.eta[2];
      for (int s = 0; s < 2; ++s) v -= g.christoffel[s](a, b) * j.eta[s];
      out(a, b) = v;
    }
  return out;
}

Mat2 rho(const SurfaceGeometry& g, const SurfaceDisplacementJet& j) {
  if (!j.dd_eta3) throw MissingSecondDerivatives("rho needs d_ab eta_3");
  const Mat2& dd3 = *j.dd_eta3;
  const Mat2& bm = g.b_mix;  // bm(a, s) = b_a^s
  const auto& G = g.christoffel;
  // covariant derivative of the tangential part: D(b, s) = d_b eta_s - Gamma^t_bs eta_t
  Mat2 D;
  for (int b = 0; b < 2; ++b)
    for (int s = 0; s < 2; ++s) D(b, s) = j.d_eta[s][b] - G[0](b, s) * j.eta[0] - G[1](b, s) * j.eta[1];
  // b_a^s b_sb
  const Mat2 bb = bm * g.b_cov;
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double v = dd3(a, b) - bb(a, b) * j.eta[2];
      for (int s = 0; s < 2; ++s) {
        v -= G[s](a, b) * j.d_eta[2][s];
        v += bm(a, s) * D(b, s) + bm(b, s) * D(a, s);
      }
      for (int t = 0; t < 2; ++t) {
        double c = g.db_mix[a](b, t);
        for (int s = 0; s < 2; ++s) c += G[t](a, s) * bm(b, s) - G[s](a, b) * bm(s, t);
        v += c * j.eta[t];
      }
      out(a, b) = v;
    }
  return out;
}

Mat3 strain3_scaled(const VolumeGeometry& vol, const VolumeDisplacementJet& j, double eps) {
  if (!(eps > 0.0)) throw ZeroThickness("eps = " + std::to_string(eps));
  const auto& G = vol.christoffel3;
  const double inv = 1.0 / eps;
  Mat3 e;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double v = 0.5 * (j.d_v(a, b) + j.d_v(b, a));
      for (int k = 0; k < 3; ++k) v -= G[k](a, b) * j.v[k];
      e(a, b) = v;
    }
  for (int a = 0; a < 2; ++a) {
    double v = 0.5 * (inv * j.d_v(a, 2) + j.d_v(2, a));
    for (int s = 0; s < 2; ++s) v -= G[s](a, 2) * j.v[s];
    e(a, 2) = e(2, a) = v;
  }
  e(2, 2) = inv * j.d_v(2, 2);
  return e;
}

ElasticityTensor2D tensor2d(const SurfaceGeometry& geom, Lame lame) {
  check_lame(lame);
  ElasticityTensor2D t;
  t.lame = lame;
  const Mat2& A = geom.a_con;
  const double c = 4.0 * lame.lambda * lame.mu / (lame.lambda + 2.0 * lame.mu);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int u = 0; u < 2; ++u)
          t(a, b, s, u) = c * A(a, b) * A(s, u) + 2.0 * lame.mu * (A(a, s) * A(b, u) + A(a, u) * A(b, s));
  return t;
}

ElasticityTensor3D tensor3d(const VolumeGeometry& vol, Lame lame) {
  check_lame(lame);
  ElasticityTensor3D t;
  t.lame = lame;
  const Mat3& G = vol.g_con;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t(i, j, k, l) = lame.lambda * G(i, j) * G(k, l) + lame.mu * (G(i, k) * G(j, l) + G(i, l) * G(j, k));
  return t;
}

}  // namespace koiter
