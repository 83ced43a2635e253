#include "koiter/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "koiter/errors.hpp"

namespace koiter {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::LagrangeP1Tri: return "LagrangeP1Tri";
    case SpaceKind::LagrangeP2Tri: return "LagrangeP2Tri";
    case SpaceKind::ReducedHCT: return "ReducedHCT";
    case SpaceKind::LagrangeP1Prism: return "LagrangeP1Prism";
    case SpaceKind::LagrangeP2Prism: return "LagrangeP2Prism";
  }
  return "?";
}

namespace {

// Cubic monomials in s = (s1, s2): 1, s1, s2, s1^2, s1 s2, s2^2, s1^3, s1^2 s2, s1 s2^2, s2^3.
using Row10 = Eigen::Matrix<double, 1, 10>;

Row10 mono(const Vec2& s) {
  const double a = s[0], b = s[1];
  Row10 m;
  m << 1, a, b, a * a, a * b, b * b, a * a * a, a * a * b, a * b * b, b * b * b;
  return m;
}

std::array<Row10, 2> mono_grad(const Vec2& s) {
  const double a = s[0], b = s[1];
  Row10 da, db;
  da << 0, 1, 0, 2 * a, b, 0, 3 * a * a, 2 * a * b, b * b, 0;
  db << 0, 0, 1, 0, a, 2 * b, 0, a * a, 2 * a * b, 3 * b * b;
  return {da, db};
}

// rows: d11, d12, d22
std::array<Row10, 3> mono_hess(const Vec2& s) {
  const double a = s[0], b = s[1];
  Row10 aa, ab, bb;
  aa << 0, 0, 0, 2, 0, 0, 6 * a, 2 * b, 0, 0;
  ab << 0, 0, 0, 0, 1, 0, 0, 2 * a, 2 * b, 0;
  bb << 0, 0, 0, 0, 0, 2, 0, 0, 2 * a, 6 * b;
  return {aa, ab, bb};
}

}  // namespace

void FunctionSpace::build_tri_common() {
  const TriMesh& m = *tri_;
  const MeshEdges edges(m);
  tri_edges_ = edges.tri_edge;
  edges_ = edges.edges;
  grad_bary_.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    Mat2 J;
    J.col(0) = m.vertices[tri[1]] - m.vertices[tri[0]];
    J.col(1) = m.vertices[tri[2]] - m.vertices[tri[0]];
    const Mat2 Ji = J.inverse();
    grad_bary_[t][1] = Ji.row(0).transpose();
    grad_bary_[t][2] = Ji.row(1).transpose();
    grad_bary_[t][0] = -grad_bary_[t][1] - grad_bary_[t][2];
  }
  const int nv = m.num_vertices();
  base_cell_dofs_.clear();
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) base_cell_dofs_.push_back(m.triangles[t][k]);
    if (order_ == 2)
      for (int k = 0; k < 3; ++k) base_cell_dofs_.push_back(nv + tri_edges_[t][k]);
  }
  base_ndof_ = order_ == 2 ? nv + edges.num_edges() : nv;
}

SpacePtr FunctionSpace::lagrange_tri(std::shared_ptr<const TriMesh> mesh, int order) {
  if (order != 1 && order != 2) throw ConfigError("Lagrange order must be 1 or 2");
  std::shared_ptr<FunctionSpace> s(new FunctionSpace);
  s->kind_ = order == 1 ? SpaceKind::LagrangeP1Tri : SpaceKind::LagrangeP2Tri;
  s->order_ = order;
  s->tri_ = std::move(mesh);
  s->build_tri_common();
  s->ndof_ = s->base_ndof_;
  s->cell_dofs_ = s->base_cell_dofs_;
  const int nloc = order == 1 ? 3 : 6;
  for (int t = 0; t < s->tri_->num_triangles(); ++t) s->cell_ptr_.push_back((t + 1) * nloc);
  return s;
}

SpacePtr FunctionSpace::reduced_hct(std::shared_ptr<const TriMesh> mesh) {
  std::shared_ptr<FunctionSpace> s(new FunctionSpace);
  s->kind_ = SpaceKind::ReducedHCT;
  s->order_ = 3;
  s->tri_ = std::move(mesh);
  s->build_tri_common();
  s->ndof_ = 3 * s->tri_->num_vertices();
  for (int t = 0; t < s->tri_->num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 3; ++c) s->cell_dofs_.push_back(3 * s->tri_->triangles[t][k] + c);
    s->cell_ptr_.push_back((t + 1) * 9);
  }
  s->build_hct();
  return s;
}

void FunctionSpace::build_hct() {
  const TriMesh& m = *tri_;
  hct_.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    std::array<Vec2, 3> P;
    for (int k = 0; k < 3; ++k) P[k] = m.vertices[m.triangles[t][k]];
    const Vec2 C = (P[0] + P[1] + P[2]) / 3.0;
    const double h = std::max({(P[1] - P[0]).norm(), (P[2] - P[1]).norm(), (P[0] - P[2]).norm()});
    std::array<Vec2, 3> S;  // scaled vertex positions
    for (int k = 0; k < 3; ++k) S[k] = (P[k] - C) / h;

    constexpr int kRows = 42;
    Eigen::Matrix<double, kRows, 30> A = Eigen::Matrix<double, kRows, 30>::Zero();
    Eigen::Matrix<double, kRows, 9> B = Eigen::Matrix<double, kRows, 9>::Zero();
    int row = 0;
    // vertex interpolation in both sub-triangles that touch the vertex;
    // sub-triangle k is (P_{k+1}, P_{k+2}, C)
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        if (k == i) continue;
        const auto g = mono_grad(S[i]);
        A.block<1, 10>(row, 10 * k) = mono(S[i]);
        B(row++, 3 * i) = 1.0;
        A.block<1, 10>(row, 10 * k) = g[0];
        B(row++, 3 * i + 1) = h;
        A.block<1, 10>(row, 10 * k) = g[1];
        B(row++, 3 * i + 2) = h;
      }
    // C1 across the interior edge C-P_i shared by sub-triangles i+1 and i+2
    for (int i = 0; i < 3; ++i) {
      const int k1 = (i + 1) % 3, k2 = (i + 2) % 3;
      const Vec2 d = S[i];  // C is the origin
      const Vec2 n = Vec2(-d[1], d[0]).normalized();
      for (double a : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
        const Row10 v = mono(a * d);
        A.block<1, 10>(row, 10 * k1) = v;
        A.block<1, 10>(row++, 10 * k2) = -v;
      }
      for (double a : {0.0, 0.5, 1.0}) {
        const auto g = mono_grad(a * d);
        const Row10 dn = n[0] * g[0] + n[1] * g[1];
        A.block<1, 10>(row, 10 * k1) = dn;
        A.block<1, 10>(row++, 10 * k2) = -dn;
      }
    }
    // reduction: normal derivative linear along each external edge
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = S[(k + 1) % 3], b = S[(k + 2) % 3];
      const Vec2 e = b - a;
      const Vec2 n = Vec2(e[1], -e[0]).normalized();
      auto dn = [&](const Vec2& s) {
        const auto g = mono_grad(s);
        return Row10(n[0] * g[0] + n[1] * g[1]);
      };
      A.block<1, 10>(row++, 10 * k) = dn(0.5 * (a + b)) - 0.5 * (dn(a) + dn(b));
    }
    const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, kRows, 30>> qr(A);
    if (qr.rank() != 30) throw SingularSystem("reduced HCT constraint system is rank deficient");
    const Eigen::Matrix<double, 30, 9> X = qr.solve(B);
    if ((A * X - B).norm() > 1e-10 * B.norm()) throw SingularSystem("reduced HCT constraints are inconsistent");
    hct_[t].centre = C;
    hct_[t].h = h;
    for (int k = 0; k < 3; ++k) hct_[t].coef[k] = X.block<10, 9>(10 * k, 0).transpose();
  }
}

SpacePtr FunctionSpace::lagrange_prism(std::shared_ptr<const PrismMesh> mesh, int order, ThicknessBasis basis,
                                       double scale) {
  if (order != 1 && order != 2) throw ConfigError("Lagrange order must be 1 or 2");
  std::shared_ptr<FunctionSpace> s(new FunctionSpace);
  s->kind_ = order == 1 ? SpaceKind::LagrangeP1Prism : SpaceKind::LagrangeP2Prism;
  s->order_ = order;
  s->tbasis_ = basis;
  s->tscale_ = scale;
  s->prism_ = mesh;
  s->tri_ = std::make_shared<const TriMesh>(mesh->base);
  s->build_tri_common();
  s->nz_ = order * mesh->layers + 1;
  s->ndof_ = s->base_ndof_ * s->nz_;
  const int nb = order == 1 ? 3 : 6;
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const int t = mesh->triangle_of(c);
    const auto te = s->eval_thickness(mesh->layer_of(c), mesh->z[mesh->layer_of(c)]);
    for (int b = 0; b < nb; ++b)
      for (int j = 0; j < te.n; ++j) s->cell_dofs_.push_back(s->base_cell_dofs_[t * nb + b] * s->nz_ + te.index[j]);
    s->cell_ptr_.push_back(static_cast<int>(s->cell_dofs_.size()));
  }
  return s;
}

Vec3 FunctionSpace::node(int dof) const {
  const int nv = tri_->num_vertices();
  auto base_node = [&](int b) -> Vec2 {
    if (kind_ == SpaceKind::ReducedHCT) return tri_->vertices[b / 3];
    if (b < nv) return tri_->vertices[b];
    const auto& e = edges_[b - nv];
    return 0.5 * (tri_->vertices[e[0]] + tri_->vertices[e[1]]);
  };
  if (!prism_) {
    const Vec2 y = base_node(dof);
    return {y[0], y[1], 0.0};
  }
  const Vec2 y = base_node(dof / nz_);
  const int k = dof % nz_;
  return {y[0], y[1], k == nz_ - 1 ? 1.0 : -1.0 + 2.0 * k / (nz_ - 1)};
}

int FunctionSpace::base_entity(int base_dof) const {
  return kind_ == SpaceKind::ReducedHCT ? base_dof / 3 : base_dof;
}

FunctionSpace::ThicknessEval FunctionSpace::eval_thickness(int layer, double x3) const {
  ThicknessEval r;
  const double z0 = prism_->z[layer], z1 = prism_->z[layer + 1];
  const double dl = z1 - z0;
  const double t = (x3 - z0) / dl;
  std::array<double, 3> L{}, dL{};
  if (order_ == 1) {
    L = {1.0 - t, t, 0.0};
    dL = {-1.0 / dl, 1.0 / dl, 0.0};
  } else {
    L = {(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)};
    dL = {(4.0 * t - 3.0) / dl, (4.0 - 8.0 * t) / dl, (4.0 * t - 1.0) / dl};
  }
  if (tbasis_ == ThicknessBasis::ScaledHierarchical) {
    r.index[r.n] = 0;
    r.val[r.n] = 1.0;
    r.dz[r.n++] = 0.0;
  }
  for (int m = 0; m <= order_; ++m) {
    const int g = order_ * layer + m;
    if (tbasis_ == ThicknessBasis::ScaledHierarchical) {
      if (g == 0) continue;
      r.index[r.n] = g;
      r.val[r.n] = tscale_ * L[m];
      r.dz[r.n++] = tscale_ * dL[m];
    } else {
      r.index[r.n] = g;
      r.val[r.n] = L[m];
      r.dz[r.n++] = dL[m];
    }
  }
  return r;
}

void FunctionSpace::eval_tri(int t, const Vec3& l, LocalBasis& out, int sub) const {
  const auto& G = grad_bary_[t];
  if (kind_ == SpaceKind::ReducedHCT) {
    const auto& cell = hct_[t];
    const auto& tri = tri_->triangles[t];
    const Vec2 y = l[0] * tri_->vertices[tri[0]] + l[1] * tri_->vertices[tri[1]] + l[2] * tri_->vertices[tri[2]];
    if (sub < 0) {
      sub = 0;
      for (int k = 1; k < 3; ++k)
        if (l[k] < l[sub]) sub = k;
    }
    const Vec2 s = (y - cell.centre) / cell.h;
    const auto& c = cell.coef[sub];
    const Eigen::Matrix<double, 9, 1> v = c * mono(s).transpose();
    const auto g = mono_grad(s);
    const auto hh = mono_hess(s);
    const Eigen::Matrix<double, 9, 1> g0 = c * g[0].transpose(), g1 = c * g[1].transpose();
    const Eigen::Matrix<double, 9, 1> h00 = c * hh[0].transpose(), h01 = c * hh[1].transpose(),
                                      h11 = c * hh[2].transpose();
    const double ih = 1.0 / cell.h, ih2 = ih * ih;
    out.n = 9;
    for (int j = 0; j < 9; ++j) {
      out.val[j] = v[j];
      out.grad[j] = Vec2(g0[j], g1[j]) * ih;
      out.hess[j] << h00[j] * ih2, h01[j] * ih2, h01[j] * ih2, h11[j] * ih2;
      out.dz[j] = 0.0;
    }
    return;
  }
  if (order_ == 1) {
    out.n = 3;
    for (int i = 0; i < 3; ++i) {
      out.val[i] = l[i];
      out.grad[i] = G[i];
      out.hess[i].setZero();
      out.dz[i] = 0.0;
    }
    return;
  }
  out.n = 6;
  for (int i = 0; i < 3; ++i) {
    out.val[i] = l[i] * (2.0 * l[i] - 1.0);
    out.grad[i] = (4.0 * l[i] - 1.0) * G[i];
    out.hess[i] = 4.0 * G[i] * G[i].transpose();
    const int j = (i + 1) % 3;
    out.val[3 + i] = 4.0 * l[i] * l[j];
    out.grad[3 + i] = 4.0 * (l[i] * G[j] + l[j] * G[i]);
    out.hess[3 + i] = 4.0 * (G[i] * G[j].transpose() + G[j] * G[i].transpose());
  }
  for (int i = 0; i < 6; ++i) out.dz[i] = 0.0;
}

void FunctionSpace::eval_prism(int c, const Vec3& l, double x3, LocalBasis& out) const {
  const int t = prism_->triangle_of(c);
  LocalBasis base;
  const auto& G = grad_bary_[t];
  if (order_ == 1) {
    base.n = 3;
    for (int i = 0; i < 3; ++i) {
      base.val[i] = l[i];
      base.grad[i] = G[i];
    }
  } else {
    base.n = 6;
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      base.val[i] = l[i] * (2.0 * l[i] - 1.0);
      base.grad[i] = (4.0 * l[i] - 1.0) * G[i];
      base.val[3 + i] = 4.0 * l[i] * l[j];
      base.grad[3 + i] = 4.0 * (l[i] * G[j] + l[j] * G[i]);
    }
  }
  const auto te = eval_thickness(prism_->layer_of(c), x3);
  out.n = base.n * te.n;
  for (int b = 0; b < base.n; ++b)
    for (int j = 0; j < te.n; ++j) {
      const int k = b * te.n + j;
      out.val[k] = base.val[b] * te.val[j];
      out.grad[k] = base.grad[b] * te.val[j];
      out.dz[k] = base.val[b] * te.dz[j];
      out.hess[k].setZero();
    }
}

std::vector<MacroPoint> macro_rule(const TriRule& rule) {
  std::vector<MacroPoint> pts;
  const Vec3 centre(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  for (int k = 0; k < 3; ++k) {
    Vec3 a = Vec3::Zero(), b = Vec3::Zero();
    a[(k + 1) % 3] = 1.0;
    b[(k + 2) % 3] = 1.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3& m = rule.bary[q];
      pts.push_back({m[0] * a + m[1] * b + m[2] * centre, rule.w[q] / 3.0, k});
    }
  }
  return pts;
}

std::vector<MacroPoint> plain_rule(const TriRule& rule) {
  std::vector<MacroPoint> pts;
  for (int q = 0; q < rule.size(); ++q) pts.push_back({rule.bary[q], rule.w[q], -1});
  return pts;
}

}  // namespace koiter
