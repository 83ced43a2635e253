#include "koiter/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "koiter/errors.hpp"
#include "koiter/kinematics.hpp"

namespace koiter {

bool CheckReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void CheckReport::add(std::string name, double value, double limit, std::string detail) {
  checks.push_back({std::move(name), value, limit, std::isfinite(value) && value <= limit, std::move(detail)});
}

void CheckReport::fail(std::string name, std::string detail) {
  checks.push_back({std::move(name), NAN, 0.0, false, std::move(detail)});
}

namespace {

std::vector<Vec2> probe_points(const ParamRect& r, int random, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts;
  for (int k = 0; k < random; ++k) pts.push_back({r.y1min + u(rng) * r.width(), r.y2min + u(rng) * r.height()});
  // the degeneracy scan also visits the edges of the rectangle
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) pts.push_back({r.y1min + i * r.width() / 8, r.y2min + j * r.height() / 8});
  return pts;
}

// central difference of the next-lower partial
Vec3 fd_partial(const Chart& c, const Vec2& y, int i, int j, double h) {
  const Vec2 e = i > 0 ? Vec2(h, 0.0) : Vec2(0.0, h);
  const int li = i > 0 ? i - 1 : i, lj = i > 0 ? j : j - 1;
  return (c.partial(y + e, li, lj) - c.partial(y - e, li, lj)) / (2 * h);
}

}  // namespace

CheckReport geometry_suite(const Chart& chart, int points, std::uint64_t seed) {
  CheckReport rep;
  const ParamRect& r = chart.rect();
  const auto pts = probe_points(r, points, seed);

  double min_cross = INFINITY;
  Vec2 where = Vec2::Zero();
  for (const Vec2& y : pts) {
    const double n = chart.partial(y, 1, 0).cross(chart.partial(y, 0, 1)).norm();
    if (n < min_cross) min_cross = n, where = y;
  }
  if (!(min_cross > kDegeneracyTol)) {
    rep.fail("nondegenerate", fmt::format("DegenerateChart: |a1 x a2| = {:.3e} at y = ({:.6g}, {:.6g})", min_cross,
                                          where[0], where[1]));
    return rep;
  }
  rep.add("nondegenerate", kDegeneracyTol / min_cross, 1.0, fmt::format("min |a1 x a2| = {:.6e}", min_cross));

  // interior points keep the difference stencils inside the rectangle
  std::vector<Vec2> inner;
  for (int k = 0; k < points; ++k) {
    const Vec2 y = pts[k];
    inner.push_back({std::clamp(y[0], r.y1min + 0.02 * r.width(), r.y1max - 0.02 * r.width()),
                     std::clamp(y[1], r.y2min + 0.02 * r.height(), r.y2max - 0.02 * r.height())});
  }

  const double h = 1e-5 * r.diagonal();
  double partials = 0.0;
  for (const Vec2& y : inner)
    for (int order = 1; order <= 3; ++order) {
      double scale = 0.0;
      for (int i = 0; i <= order; ++i) scale = std::max(scale, chart.partial(y, i, order - i).norm());
      for (int i = 0; i <= order; ++i) {
        const Vec3 an = chart.partial(y, i, order - i);
        partials = std::max(partials, (an - fd_partial(chart, y, i, order - i, h)).norm() / std::max(an.norm(), scale));
      }
    }
  rep.add("partials vs central differences", partials, 1e-6, "relative, orders 1 to 3");

  double kappa = 0.0, kmin = INFINITY, kmax = -INFINITY;
  for (const Vec2& y : inner) {
    const auto g = surface_at(chart, y);
    kappa = std::max(kappa, std::abs(g.b_mix.determinant() - g.kappa) / std::max(1.0, std::abs(g.kappa)));
    kmin = std::min(kmin, g.kappa);
    kmax = std::max(kmax, g.kappa);
  }
  rep.add("kappa = det(b_a^b)", kappa, 1e-10, fmt::format("kappa in [{:.6g}, {:.6g}]", kmin, kmax));

  const double eps = std::min(0.5, 0.5 * min_curvature_radius(chart, 32));
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> ux3(-1.0, 1.0);
  double christoffel = 0.0;
  for (const Vec2& y : inner) {
    const auto v = volume_at(chart, y, ux3(rng), eps);
    for (int a = 0; a < 2; ++a) christoffel = std::max(christoffel, std::abs(v.christoffel3[2](a, 2)));
    for (int p = 0; p < 3; ++p) christoffel = std::max(christoffel, std::abs(v.christoffel3[p](2, 2)));
  }
  rep.add("Gamma^3_a3 = Gamma^p_33 = 0", christoffel, 1e-12, fmt::format("eps = {:.3g}", eps));
  return rep;
}

CheckReport kinematics_suite(const Chart& chart, int points, std::uint64_t seed) {
  CheckReport rep;
  const ParamRect& r = chart.rect();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ur(0.1, 0.9);
  const double h = 1e-3 * r.diagonal();
  double eg = 0.0, er = 0.0;
  for (int k = 0; k < points; ++k) {
    Eigen::Matrix<double, 3, 6> c;  // eta_i = c_i . (1, y1, y2, y1^2, y1 y2, y2^2)
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < 6; ++m) c(i, m) = u(rng);
    auto eta = [&](const Vec2& y) {
      Eigen::Matrix<double, 6, 1> m;
      m << 1, y[0], y[1], y[0] * y[0], y[0] * y[1], y[1] * y[1];
      return Vec3(c * m);
    };
    auto field = [&](const Vec2& y) {
      const auto g = surface_at(chart, y);
      const Vec3 e = eta(y);
      return Vec3(e[0] * g.dual[0] + e[1] * g.dual[1] + e[2] * g.dual[2]);
    };
    auto unit = [&](int a) { return a == 0 ? Vec2(h, 0) : Vec2(0, h); };
    // fourth-order central stencils
    auto d = [&](const Vec2& y, int a) {
      const Vec2 e = unit(a);
      return Vec3((8 * (field(y + e) - field(y - e)) - (field(y + 2 * e) - field(y - 2 * e))) / (12 * h));
    };
    auto dd = [&](const Vec2& y, int a, int b) {
      const Vec2 e = unit(a);
      return Vec3((8 * (d(y + e, b) - d(y - e, b)) - (d(y + 2 * e, b) - d(y - 2 * e, b))) / (12 * h));
    };

    const Vec2 y(r.y1min + ur(rng) * r.width(), r.y2min + ur(rng) * r.height());
    const auto g = surface_at(chart, y);
    SurfaceDisplacementJet jet;
    jet.eta = eta(y);
    for (int i = 0; i < 3; ++i)
      jet.d_eta[i] = {c(i, 1) + 2 * c(i, 3) * y[0] + c(i, 4) * y[1], c(i, 2) + c(i, 4) * y[0] + 2 * c(i, 5) * y[1]};
    jet.dd_eta3 = (Mat2() << 2 * c(2, 3), c(2, 4), c(2, 4), 2 * c(2, 5)).finished();

    Mat2 go, ro;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        go(a, b) = 0.5 * (d(y, a).dot(g.base[b]) + d(y, b).dot(g.base[a]));
        Vec3 v = dd(y, a, b);
        for (int s = 0; s < 2; ++s) v -= g.christoffel[s](a, b) * d(y, s);
        ro(a, b) = v.dot(g.base[2]);
      }
    eg = std::max(eg, (gamma(g, jet) - go).cwiseAbs().maxCoeff() / go.cwiseAbs().maxCoeff());
    er = std::max(er, (rho(g, jet) - ro).cwiseAbs().maxCoeff() / ro.cwiseAbs().maxCoeff());
  }
  rep.add("gamma vs Cartesian oracle", eg, 1e-6, fmt::format("{} random quadratic fields", points));
  rep.add("rho vs Cartesian oracle", er, 1e-5, "relative to max entry");
  return rep;
}

namespace {

std::array<Vec2, 3> bary_grads(const TriMesh& m, int t) {
  const auto& tri = m.triangles[t];
  Mat2 J;
  J.col(0) = m.vertices[tri[1]] - m.vertices[tri[0]];
  J.col(1) = m.vertices[tri[2]] - m.vertices[tri[0]];
  const Mat2 Jit = J.inverse().transpose();
  const Vec2 g1 = Jit * Vec2(1, 0), g2 = Jit * Vec2(0, 1);
  return {-g1 - g2, g1, g2};
}

// Cartesian P1 x P1 stiffness of the prism mesh y x (eps x3), divided by eps
Eigen::MatrixXd cartesian_stiffness(const PrismMesh& pm, const MixedSpace& layout, Lame lame, double eps) {
  const TriMesh& m = pm.base;
  const int nz = pm.layers + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(layout.ndof(), layout.ndof());
  const Vec3 mid[3] = {{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
  const double gx = 1 / std::sqrt(3.0);
  for (int c = 0; c < pm.num_cells(); ++c) {
    const int t = pm.triangle_of(c), l = pm.layer_of(c);
    const auto gb = bary_grads(m, t);
    const double h = eps * (pm.z[l + 1] - pm.z[l]);
    for (const Vec3& lam : mid)
      for (double xi : {-gx, gx}) {
        const double zeta = 0.5 * (xi + 1);
        const double w = m.signed_area(t) / 3.0 * 0.5 * h;
        std::vector<Vec3> grad;
        std::vector<int> ids;
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 2; ++k) {
            const double lk = k == 0 ? 1 - zeta : zeta, dlk = (k == 0 ? -1 : 1) / h;
            grad.push_back({gb[i][0] * lk, gb[i][1] * lk, lam[i] * dlk});
            ids.push_back(m.triangles[t][i] * nz + l + k);
          }
        for (std::size_t A = 0; A < grad.size(); ++A)
          for (std::size_t B = 0; B < grad.size(); ++B)
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) {
                Mat3 ea = Mat3::Zero(), eb = Mat3::Zero();
                ea.row(a) = grad[A].transpose();
                eb.row(b) = grad[B].transpose();
                ea = 0.5 * (ea + ea.transpose()).eval();
                eb = 0.5 * (eb + eb.transpose()).eval();
                const double e =
                    lame.lambda * ea.trace() * eb.trace() + 2 * lame.mu * (ea.array() * eb.array()).sum();
                K(layout.offset(a) + ids[A], layout.offset(b) + ids[B]) += w * e / eps;
              }
      }
  }
  return K;
}

}  // namespace

CheckReport plane_reduction_suite(std::uint64_t seed) {
  CheckReport rep;
  PlaneChart plane;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ur(0.0, 1.0);

  double dg = 0.0, dr = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto g = surface_at(plane, {ur(rng), ur(rng)});
    SurfaceDisplacementJet j;
    for (int i = 0; i < 3; ++i) j.eta[i] = u(rng), j.d_eta[i] = {u(rng), u(rng)};
    const double off = u(rng);
    j.dd_eta3 = (Mat2() << u(rng), off, off, u(rng)).finished();
    Mat2 sym;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) sym(a, b) = 0.5 * (j.d_eta[a][b] + j.d_eta[b][a]);
    dg = std::max(dg, (gamma(g, j) - sym).cwiseAbs().maxCoeff());
    dr = std::max(dr, (rho(g, j) - *j.dd_eta3).cwiseAbs().maxCoeff());
  }
  rep.add("gamma = symmetric gradient", dg, 1e-10, "100 random jets");
  rep.add("rho = Hessian of eta_3", dr, 1e-10, "100 random jets");

  const auto base = std::make_shared<const TriMesh>(structured_tri(ParamRect{}, 1, 1, BoundarySpec::entire()));
  const auto pm = std::make_shared<const PrismMesh>(extrude(*base, 2));
  const auto s = FunctionSpace::lagrange_prism(pm, 1);
  const MixedSpace layout({s, s, s});
  const Lame lame{1.3, 0.7};
  for (double eps : {1.0, 0.25}) {
    const Eigen::MatrixXd ref = cartesian_stiffness(*pm, layout, lame, eps);
    const Eigen::MatrixXd K(assemble_3d_scaled(plane, lame, eps, ShellLoad{}, layout).matrix);
    rep.add(fmt::format("3D form = Cartesian elasticity (eps = {:g})", eps),
            (K - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-10,
            "2 triangles x 2 layers, relative to max entry");
  }
  return rep;
}

namespace {

struct Trace {
  double v;
  Vec2 g;
};

Trace trace(const FunctionSpace& s, const Eigen::VectorXd& u, int t, const Vec3& l) {
  LocalBasis b;
  s.eval_tri(t, l, b);
  const auto dofs = s.cell_dofs(t);
  Trace r{0.0, Vec2::Zero()};
  for (int j = 0; j < b.n; ++j) r.v += u[dofs[j]] * b.val[j], r.g += u[dofs[j]] * b.grad[j];
  return r;
}

}  // namespace

CheckReport conformity_suite(int n, std::uint64_t seed) {
  CheckReport rep;
  const BoundarySpec clamp = BoundarySpec::edges({RectSide::Bottom, RectSide::Left});
  const auto mesh = std::make_shared<const TriMesh>(structured_tri(ParamRect{}, n, n, clamp));
  const auto hct = FunctionSpace::reduced_hct(mesh);
  const MeshEdges edges(*mesh);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd u(hct->ndof());
  for (int i = 0; i < u.size(); ++i) u[i] = nd(rng);

  double jv = 0.0, jg = 0.0;
  int count = 0;
  for (int e = 0; e < edges.num_edges(); ++e) {
    if (!edges.is_interior(e)) continue;
    ++count;
    const Vec2 p0 = mesh->vertices[edges.edges[e][0]], p1 = mesh->vertices[edges.edges[e][1]];
    for (double s : {0.1, 0.37, 0.5, 0.81}) {
      const Vec2 y = (1 - s) * p0 + s * p1;
      const int ta = edges.edge_tri[e][0], tb = edges.edge_tri[e][1];
      const auto a = trace(*hct, u, ta, barycentric(*mesh, ta, y));
      const auto b = trace(*hct, u, tb, barycentric(*mesh, tb, y));
      jv = std::max(jv, std::abs(a.v - b.v));
      jg = std::max(jg, (a.g - b.g).norm() / n);  // gradients of O(1) dofs scale like n
    }
  }
  rep.add("HCT value jump on interior edges", jv, 1e-10, fmt::format("{} edges, {}x{} mesh", count, n, n));
  rep.add("HCT gradient jump on interior edges", jg, 1e-10, "times h");

  double cv = 0.0, cg = 0.0;
  for (int d : apply_clamping(*hct, clamp)) u[d] = 0.0;
  const TriLocator locator(*mesh);
  for (const auto& be : mesh->boundary_edges) {
    if (!clamp.clamps(be.side)) continue;
    for (double s : {0.25, 0.5, 0.9}) {
      const Vec2 y = (1 - s) * mesh->vertices[be.v[0]] + s * mesh->vertices[be.v[1]];
      const int t = locator.locate(y).triangle;
      const auto tr = trace(*hct, u, t, barycentric(*mesh, t, y));
      const int normal = be.side == RectSide::Bottom || be.side == RectSide::Top ? 1 : 0;
      cv = std::max(cv, std::abs(tr.v));
      cg = std::max(cg, std::abs(tr.g[normal]) / n);
    }
  }
  rep.add("clamped value trace", cv, 1e-10, "HCT on the bottom and left sides");
  rep.add("clamped normal derivative trace", cg, 1e-10, "times h");
  return rep;
}

double relative_asymmetry(const SparseMatrix& A) {
  const SparseMatrix D = SparseMatrix(A.transpose()) - A;
  double dmax = 0.0, amax = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : dmax;
}

void SystemAudit::record(const std::string& label, const SparseMatrix& A, const SolveReport& report) {
  ++systems;
  const double asym = relative_asymmetry(A);
  if (asym >= worst_asymmetry) worst_asymmetry = asym, worst_asymmetry_label = label;
  if (report.residual >= worst_residual)
    worst_residual = report.residual, worst_floor = report.rounding_floor, worst_residual_label = label;
}

}  // namespace koiter
