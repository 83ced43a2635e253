#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "koiter/errors.hpp"
#include "koiter/fem.hpp"
#include "parallel.hpp"

namespace koiter {

MixedSpace::MixedSpace(std::vector<SpacePtr> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw SpaceMeshMismatch("empty layout");
  offsets_.push_back(0);
  for (const auto& s : comps_) {
    const bool same = s->is_prism() ? s->prism_mesh_ptr() == comps_.front()->prism_mesh_ptr()
                                    : s->tri_mesh_ptr() == comps_.front()->tri_mesh_ptr();
    if (!same || s->is_prism() != comps_.front()->is_prism())
      throw SpaceMeshMismatch("components of a layout must share one mesh");
    offsets_.push_back(offsets_.back() + s->ndof());
  }
  constrained_.assign(offsets_.back(), 0);
}

void MixedSpace::cell_dofs(int cell, std::vector<int>& out) const {
  out.clear();
  for (int c = 0; c < num_components(); ++c)
    for (int d : comps_[c]->cell_dofs(cell)) out.push_back(offsets_[c] + d);
}

void MixedSpace::clamp(int c, const BoundarySpec& boundary) {
  for (int d : apply_clamping(*comps_[c], boundary)) constrained_[offsets_[c] + d] = 1;
}

int MixedSpace::num_constrained() const {
  return static_cast<int>(std::count(constrained_.begin(), constrained_.end(), 1));
}

std::vector<int> apply_clamping(const FunctionSpace& space, const BoundarySpec& boundary) {
  const TriMesh& mesh = space.tri_mesh();
  const MeshEdges edges(mesh);
  std::map<std::array<int, 2>, int> edge_id;
  for (int e = 0; e < edges.num_edges(); ++e) edge_id[edges.edges[e]] = e;
  std::set<int> verts, eds;
  for (const auto& be : mesh.boundary_edges) {
    if (!boundary.clamps(be.side)) continue;
    verts.insert(be.v[0]);
    verts.insert(be.v[1]);
    eds.insert(edge_id.at({std::min(be.v[0], be.v[1]), std::max(be.v[0], be.v[1])}));
  }
  std::vector<int> base;
  if (space.kind() == SpaceKind::ReducedHCT) {
    for (int v : verts)
      for (int c = 0; c < 3; ++c) base.push_back(3 * v + c);
    return base;
  }
  base.assign(verts.begin(), verts.end());
  if (space.base_order() == 2)
    for (int e : eds) base.push_back(mesh.num_vertices() + e);
  std::sort(base.begin(), base.end());
  if (!space.is_prism()) return base;
  std::vector<int> out;
  for (int b : base)
    for (int k = 0; k < space.thickness_count(); ++k) out.push_back(b * space.thickness_count() + k);
  return out;
}

namespace {

constexpr int kChunk = 256;

struct ElementBuffer {
  std::vector<int> dofs;
  Eigen::MatrixXd K1, K2;
  Eigen::VectorXd f;
  std::array<Eigen::VectorXd, 3> load;
};

// Symmetric sparsity pattern of the cell-dof coupling.
SparseMatrix pattern(const MixedSpace& layout) {
  const int n = layout.ndof();
  std::vector<std::vector<int>> cells_of(n);
  std::vector<int> dofs;
  for (int c = 0; c < layout.num_cells(); ++c) {
    layout.cell_dofs(c, dofs);
    for (int d : dofs) cells_of[d].push_back(c);
  }
  SparseMatrix m(n, n);
  std::vector<std::vector<int>> cols(n);
  Eigen::VectorXi counts(n);
  for (int j = 0; j < n; ++j) {
    auto& col = cols[j];
    for (int c : cells_of[j]) {
      layout.cell_dofs(c, dofs);
      col.insert(col.end(), dofs.begin(), dofs.end());
    }
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    counts[j] = static_cast<int>(col.size());
    std::vector<int>().swap(cells_of[j]);
  }
  m.reserve(counts);
  for (int j = 0; j < n; ++j)
    for (int i : cols[j]) m.insert(i, j) = 0.0;
  m.makeCompressed();
  return m;
}

void scatter(SparseMatrix& m, const std::vector<int>& dofs, const Eigen::MatrixXd& K) {
  const int n = static_cast<int>(dofs.size());
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  double* val = m.valuePtr();
  for (int b = 0; b < n; ++b) {
    const int j = dofs[b];
    const int* lo = inner + outer[j];
    const int* hi = inner + outer[j + 1];
    for (int a = 0; a < n; ++a) {
      const int* p = std::lower_bound(lo, hi, dofs[a]);
      val[p - inner] += K(a, b);
    }
  }
}

// Computes element buffers in chunks (in parallel when asked) and hands them
// to `sink` strictly in cell order, so the summation order never depends on
// the thread schedule.
template <class Compute, class Sink>
void for_each_cell(int ncells, AssemblyMode mode, Compute&& compute, Sink&& sink) {
  std::vector<ElementBuffer> buf(std::min(kChunk, std::max(ncells, 1)));
  for (int start = 0; start < ncells; start += kChunk) {
    const int count = std::min(kChunk, ncells - start);
    if (mode == AssemblyMode::Parallel) {
      detail::parallel_for(count, [&](int k) { compute(start + k, buf[k]); });
    } else {
      for (int k = 0; k < count; ++k) compute(start + k, buf[k]);
    }
    for (int k = 0; k < count; ++k) sink(start + k, buf[k]);
  }
}

bool has_c1(const MixedSpace& layout) {
  for (int c = 0; c < layout.num_components(); ++c)
    if (layout.space(c).is_c1()) return true;
  return false;
}

void check_surface_layout(const MixedSpace& layout) {
  if (layout.is_prism() || layout.num_components() != 3)
    throw SpaceMeshMismatch("surface forms need three triangle-space components");
}

SurfaceDisplacementJet single_jet(int comp, const LocalBasis& b, int j) {
  SurfaceDisplacementJet jet;
  jet.eta[comp] = b.val[j];
  jet.d_eta[comp] = b.grad[j];
  jet.dd_eta3 = comp == 2 ? b.hess[j] : Mat2::Zero();
  return jet;
}

Vec2 point_of(const TriMesh& mesh, int t, const Vec3& l) {
  const auto& tri = mesh.triangles[t];
  return l[0] * mesh.vertices[tri[0]] + l[1] * mesh.vertices[tri[1]] + l[2] * mesh.vertices[tri[2]];
}

struct SurfaceKernel {
  const Chart& chart;
  Lame lame;
  const MixedSpace& layout;
  std::vector<MacroPoint> rule_m, rule_f;
  bool membrane, flexural, loads;

  void operator()(int t, ElementBuffer& e) const {
    layout.cell_dofs(t, e.dofs);
    const int n = static_cast<int>(e.dofs.size());
    const TriMesh& mesh = layout.space(0).tri_mesh();
    const double detJ = 2.0 * mesh.signed_area(t);
    e.K1.setZero(n, n);
    e.K2.setZero(n, n);
    for (auto& l : e.load) l.setZero(n);
    Eigen::MatrixXd B(3, n);
    std::array<LocalBasis, 3> lb;

    auto visit = [&](const MacroPoint& q, bool do_m, bool do_f, bool do_load) {
      const auto g = surface_at(chart, point_of(mesh, t, q.bary));
      int off = 0;
      std::array<int, 3> offs{};
      for (int c = 0; c < 3; ++c) {
        layout.space(c).eval_tri(t, q.bary, lb[c], q.sub);
        offs[c] = off;
        off += lb[c].n;
      }
      const double w = q.w * detJ * g.sqrt_a;
      const Mat3 C = (do_m || do_f) ? tensor2d(g, lame).voigt() : Mat3::Zero();
      if (do_m) {
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < lb[c].n; ++j) B.col(offs[c] + j) = voigt2(gamma(g, single_jet(c, lb[c], j)));
        e.K1.noalias() += w * B.transpose() * C * B;
      }
      if (do_f) {
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < lb[c].n; ++j) B.col(offs[c] + j) = voigt2(rho(g, single_jet(c, lb[c], j)));
        e.K2.noalias() += (w / 3.0) * B.transpose() * C * B;
      }
      if (do_load)
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < lb[c].n; ++j) e.load[c][offs[c] + j] += w * lb[c].val[j];
    };

    const bool shared = membrane && flexural && rule_m.size() == rule_f.size() &&
                        std::equal(rule_m.begin(), rule_m.end(), rule_f.begin(), [](const auto& a, const auto& b) {
                          return a.bary == b.bary && a.w == b.w && a.sub == b.sub;
                        });
    if (shared) {
      for (const auto& q : rule_f) visit(q, true, true, loads);
      return;
    }
    if (membrane)
      for (const auto& q : rule_m) visit(q, true, false, false);
    if (flexural || loads)
      for (const auto& q : rule_f) visit(q, false, flexural, loads);
  }
};

std::vector<MacroPoint> surface_rule(const MixedSpace& layout, int degree) {
  const TriRule r = triangle_rule(degree);
  return has_c1(layout) ? macro_rule(r) : plain_rule(r);
}

SurfaceOperators surface_ops(const Chart& chart, Lame lame, const MixedSpace& layout, const QuadSpec& quad,
                             bool membrane, bool flexural, bool loads, AssemblyMode mode) {
  check_surface_layout(layout);
  if (flexural && !layout.space(2).is_c1())
    throw WrongTransverseSpace("B_F needs second derivatives of eta_3; got " + to_string(layout.space(2).kind()));
  tensor2d(surface_at(chart, point_of(layout.space(0).tri_mesh(), 0, Vec3::Constant(1.0 / 3.0))), lame);
  SurfaceKernel kernel{chart,
                       lame,
                       layout,
                       surface_rule(layout, quad.membrane >= 0 ? quad.membrane : quad.tri),
                       surface_rule(layout, quad.tri),
                       membrane,
                       flexural,
                       loads};
  SurfaceOperators ops;
  const SparseMatrix pat = pattern(layout);
  if (membrane) ops.M = pat;
  if (flexural) ops.F = pat;
  for (auto& l : ops.load) l.setZero(layout.ndof());
  for_each_cell(
      layout.num_cells(), mode, [&](int t, ElementBuffer& e) { kernel(t, e); },
      [&](int, const ElementBuffer& e) {
        if (membrane) scatter(ops.M, e.dofs, e.K1);
        if (flexural) scatter(ops.F, e.dofs, e.K2);
        if (loads)
          for (int c = 0; c < 3; ++c)
            for (std::size_t a = 0; a < e.dofs.size(); ++a) ops.load[c][e.dofs[a]] += e.load[c][a];
      });
  return ops;
}

void check_penalty(double penalty) {
  if (!(penalty > 0.0) || !std::isfinite(penalty))
    throw InvalidPenalty("penalty must be positive and finite, got " + std::to_string(penalty));
}

}  // namespace

SurfaceOperators assemble_surface_operators(const Chart& chart, Lame lame, const MixedSpace& layout,
                                            const QuadSpec& quad, bool with_flexural, AssemblyMode mode) {
  return surface_ops(chart, lame, layout, quad, true, with_flexural, true, mode);
}

SparseMatrix assemble_membrane(const Chart& chart, Lame lame, const MixedSpace& layout, const QuadSpec& quad,
                               AssemblyMode mode) {
  return surface_ops(chart, lame, layout, quad, true, false, false, mode).M;
}

SparseMatrix assemble_flexural(const Chart& chart, Lame lame, const MixedSpace& layout, const QuadSpec& quad,
                               AssemblyMode mode) {
  return surface_ops(chart, lame, layout, quad, false, true, false, mode).F;
}

Eigen::VectorXd surface_rhs(const SurfaceOperators& ops, const Vec3& p) {
  return p[0] * ops.load[0] + p[1] * ops.load[1] + p[2] * ops.load[2];
}

SparseSystem constrain(SparseMatrix matrix, Eigen::VectorXd rhs, const std::vector<char>& constrained) {
  for (int j = 0; j < matrix.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(matrix, j); it; ++it)
      if (constrained[it.row()] || constrained[it.col()]) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
  for (int i = 0; i < rhs.size(); ++i)
    if (constrained[i]) rhs[i] = 0.0;
  return {std::move(matrix), std::move(rhs), constrained};
}

SparseSystem koiter_system(const SurfaceOperators& ops, double eps, const ShellLoad& load, const MixedSpace& layout) {
  if (!(eps > 0.0)) throw ZeroThickness("eps = " + std::to_string(eps));
  SparseMatrix A = eps * ops.M + (eps * eps * eps) * ops.F;
  return constrain(std::move(A), surface_rhs(ops, 2.0 * eps * load.f + load.h_plus + load.h_minus),
                   layout.constrained());
}

SparseSystem assemble_koiter(const Chart& chart, Lame lame, double eps, const ShellLoad& load,
                             const MixedSpace& layout, const QuadSpec& quad, AssemblyMode mode) {
  if (!(eps > 0.0)) throw ZeroThickness("eps = " + std::to_string(eps));
  return koiter_system(assemble_surface_operators(chart, lame, layout, quad, true, mode), eps, load, layout);
}

SparseSystem assemble_limit_membrane(const Chart& chart, Lame lame, const ShellLoad& load, const MixedSpace& layout,
                                     const QuadSpec& quad, AssemblyMode mode) {
  check_surface_layout(layout);
  const TriMesh& mesh = layout.space(0).tri_mesh();
  const auto rule = surface_rule(layout, quad.tri);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& q : rule) {
      const double k = surface_at(chart, point_of(mesh, t, q.bary)).kappa;
      if (!(k > 0.0))
        throw NotElliptic("Gaussian curvature " + std::to_string(k) + " <= 0 in triangle " + std::to_string(t));
    }
  auto ops = surface_ops(chart, lame, layout, quad, true, false, true, mode);
  return constrain(std::move(ops.M), surface_rhs(ops, 2.0 * load.f + load.h_plus + load.h_minus),
                   layout.constrained());
}

SparseSystem penalized_system(const SurfaceOperators& ops, double penalty, const ShellLoad& load,
                              const MixedSpace& layout) {
  check_penalty(penalty);
  SparseMatrix A = ops.F + penalty * ops.M;
  return constrain(std::move(A), surface_rhs(ops, 2.0 * load.f + load.h_plus + load.h_minus), layout.constrained());
}

SparseSystem assemble_limit_flexural_penalized(const Chart& chart, Lame lame, const ShellLoad& load,
                                               const MixedSpace& layout, const QuadSpec& quad, double penalty,
                                               AssemblyMode mode) {
  check_penalty(penalty);
  return penalized_system(assemble_surface_operators(chart, lame, layout, quad, true, mode), penalty, load, layout);
}

namespace {

struct VolumeKernel {
  const Chart& chart;
  Lame lame;
  double eps;
  const ShellLoad& load;
  const MixedSpace& layout;
  PrismRule rule;
  bool faces;

  void operator()(int cell, ElementBuffer& e) const {
    layout.cell_dofs(cell, e.dofs);
    const int n = static_cast<int>(e.dofs.size());
    const PrismMesh& pm = layout.space(0).prism_mesh();
    const TriMesh& base = pm.base;
    const int t = pm.triangle_of(cell), l = pm.layer_of(cell);
    const double detJ = 2.0 * base.signed_area(t);
    const double z0 = pm.z[l], dz = pm.z[l + 1] - pm.z[l];
    e.K1.setZero(n, n);
    e.f.setZero(n);
    Eigen::Matrix<double, 6, Eigen::Dynamic> B(6, n);
    std::array<LocalBasis, 3> lb;
    std::array<int, 3> offs{};

    auto eval = [&](const Vec3& bary, double x3) {
      int off = 0;
      for (int c = 0; c < 3; ++c) {
        layout.space(c).eval_prism(cell, bary, x3, lb[c]);
        offs[c] = off;
        off += lb[c].n;
      }
    };
    auto add_load = [&](const Vec3& f, double w) {
      for (int c = 0; c < 3; ++c)
        if (f[c] != 0.0)
          for (int j = 0; j < lb[c].n; ++j) e.f[offs[c] + j] += w * f[c] * lb[c].val[j];
    };

    for (int q = 0; q < rule.tri.size(); ++q) {
      const Vec3& bary = rule.tri.bary[q];
      const auto s = surface_at(chart, point_of(base, t, bary));
      for (std::size_t k = 0; k < rule.line.x.size(); ++k) {
        const double x3 = z0 + 0.5 * (rule.line.x[k] + 1.0) * dz;
        const auto vol = volume_at(s, x3, eps);
        // a reflected frame means det g vanished between the middle surface and x3
        if (!vol.orientation_preserved)
          throw ThicknessExceedsCurvature("eps = " + std::to_string(eps) +
                                          " exceeds the distance to the focal surface in cell " +
                                          std::to_string(cell));
        eval(bary, x3);
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < lb[c].n; ++j) {
            VolumeDisplacementJet jet;
            jet.v[c] = lb[c].val[j];
            jet.d_v(c, 0) = lb[c].grad[j][0];
            jet.d_v(c, 1) = lb[c].grad[j][1];
            jet.d_v(c, 2) = lb[c].dz[j];
            B.col(offs[c] + j) = voigt3(strain3_scaled(vol, jet, eps));
          }
        const double w = rule.tri.w[q] * detJ * rule.line.w[k] * 0.5 * dz * vol.sqrt_g;
        const Mat6 C = tensor3d(vol, lame).voigt();
        e.K1.noalias() += w * B.transpose() * C * B;
        add_load(load.f, w);
      }
      if (faces && (l == 0 || l == pm.layers - 1)) {
        // surface forces, (1/eps) int h^i v_i sqrt(g) dy on x3 = +-1
        for (int side = 0; side < 2; ++side) {
          const bool top = side == 1;
          if ((top && l != pm.layers - 1) || (!top && l != 0)) continue;
          const Vec3& h = top ? load.h_plus : load.h_minus;
          if (h.isZero()) continue;
          const double x3 = top ? 1.0 : -1.0;
          const auto vol = volume_at(s, x3, eps);
          eval(bary, x3);
          add_load(h, rule.tri.w[q] * detJ * vol.sqrt_g / eps);
        }
      }
    }
  }
};

}  // namespace

SparseSystem assemble_3d_scaled(const Chart& chart, Lame lame, double eps, const ShellLoad& load,
                                const MixedSpace& layout, const QuadSpec& quad, AssemblyMode mode) {
  if (!layout.is_prism() || layout.num_components() != 3)
    throw SpaceMeshMismatch("the 3D problem needs three prism-space components");
  if (!(eps > 0.0)) throw ZeroThickness("eps = " + std::to_string(eps));
  tensor3d(VolumeGeometry{.g_con = Mat3::Identity()}, lame);
  const bool faces = !load.h_plus.isZero() || !load.h_minus.isZero();
  VolumeKernel kernel{chart, lame, eps, load, layout, prism_rule(quad.prism), faces};
  SparseMatrix A = pattern(layout);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(layout.ndof());
  for_each_cell(
      layout.num_cells(), mode, [&](int c, ElementBuffer& e) { kernel(c, e); },
      [&](int, const ElementBuffer& e) {
        scatter(A, e.dofs, e.K1);
        for (std::size_t a = 0; a < e.dofs.size(); ++a) rhs[e.dofs[a]] += e.f[a];
      });
  return constrain(std::move(A), std::move(rhs), layout.constrained());
}

SurfaceSample sample_surface(const DiscreteField& field, int tri, const Vec3& bary, int sub) {
  SurfaceSample s;
  LocalBasis lb;
  const MixedSpace& layout = *field.layout;
  for (int c = 0; c < layout.num_components(); ++c) {
    const auto& sp = layout.space(c);
    sp.eval_tri(tri, bary, lb, sub);
    const auto dofs = sp.cell_dofs(tri);
    for (int j = 0; j < lb.n; ++j) {
      const double u = field.coef[layout.offset(c) + dofs[j]];
      s.eta[c] += u * lb.val[j];
      s.d_eta[c] += u * lb.grad[j];
      s.dd_eta[c] += u * lb.hess[j];
    }
  }
  return s;
}

VolumeDisplacementJet sample_volume(const DiscreteField& field, int cell, const Vec3& bary, double x3) {
  VolumeDisplacementJet v;
  LocalBasis lb;
  const MixedSpace& layout = *field.layout;
  for (int c = 0; c < layout.num_components(); ++c) {
    const auto& sp = layout.space(c);
    sp.eval_prism(cell, bary, x3, lb);
    const auto dofs = sp.cell_dofs(cell);
    for (int j = 0; j < lb.n; ++j) {
      const double u = field.coef[layout.offset(c) + dofs[j]];
      v.v[c] += u * lb.val[j];
      v.d_v(c, 0) += u * lb.grad[j][0];
      v.d_v(c, 1) += u * lb.grad[j][1];
      v.d_v(c, 2) += u * lb.dz[j];
    }
  }
  return v;
}

}  // namespace koiter
