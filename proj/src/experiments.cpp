#include "koiter/experiments.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "koiter/errors.hpp"
#include "parallel.hpp"

namespace koiter {

std::string to_string(ShellKind k) {
  switch (k) {
    case ShellKind::EllipticMembrane: return "elliptic_membrane";
    case ShellKind::GeneralizedMembrane: return "generalized_membrane";
    case ShellKind::Flexural: return "flexural";
  }
  return "?";
}

std::string to_string(ForceScaling s) { return s == ForceScaling::MembraneData ? "membrane_data" : "flexural_data"; }

ChartPtr ShellCase::make_chart() const {
  auto params = chart_params;
  params["y1min"] = rect.y1min;
  params["y1max"] = rect.y1max;
  params["y2min"] = rect.y2min;
  params["y2max"] = rect.y2max;
  return koiter::make_chart(chart, params);
}

void ShellCase::validate() const {
  auto fail = [&](const std::string& what) { throw ConfigError("case '" + name + "': " + what); };
  if (eps_list.empty()) fail("empty eps list");
  for (double e : eps_list)
    if (!(e > 0.0)) fail("eps values must be positive");
  if (!(lame.mu > 0.0) || !(lame.lambda >= 0.0)) fail("invalid Lame constants");
  if (young > 0.0) {
    const Lame ref = Lame::from_young_poisson(young, poisson);
    if (std::abs(lame.lambda - ref.lambda) > 0.02 * ref.lambda || std::abs(lame.mu - ref.mu) > 0.02 * ref.mu)
      fail(fmt::format("lambda = {:g}, mu = {:g} differ from E, nu values {:g}, {:g} by more than 2%", lame.lambda,
                       lame.mu, ref.lambda, ref.mu));
  }
  if (mesh.n1 < 1 || mesh.n2 < 1 || mesh.n1_3d < 1 || mesh.n2_3d < 1) fail("mesh resolution must be positive");
  if (mesh.layers < 2 || mesh.layers % 2) fail("layer count must be even and at least 2");
  if (kind == ShellKind::Flexural && !(penalty > 0.0 && std::isfinite(penalty)))
    throw InvalidPenalty("case '" + name + "': penalty must be positive and finite");
  if (tangential_order < 1 || tangential_order > 2 || prism_order < 1 || prism_order > 2)
    fail("element orders must be 1 or 2");
}

std::vector<ShellCase> builtin_cases() {
  using std::numbers::pi;
  ShellCase ell;
  ell.name = "elliptic";
  ell.kind = ShellKind::EllipticMembrane;
  ell.chart = "ellipsoid";
  ell.chart_params = {{"m", 0.06}, {"n", 0.05}, {"l", 0.03}};
  ell.rect = {pi / 6, 5 * pi / 6, 0.0, pi};
  ell.boundary = BoundarySpec::entire();
  ell.young = 2.0e11;
  ell.poisson = 0.25;
  ell.lame = {8.0e10, 8.0e10};
  ell.f = Vec3::Constant(0.1);
  ell.scaling = ForceScaling::MembraneData;
  ell.eps_list = {8e-2, 4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};

  ShellCase gen;
  gen.name = "generalized";
  gen.kind = ShellKind::GeneralizedMembrane;
  gen.chart = "cylinder";
  gen.chart_params = {{"r", 0.2}, {"h", 0.4}};
  gen.rect = {0.0, pi, 0.0, 1.0};
  gen.boundary = BoundarySpec::edges({RectSide::Bottom});
  gen.young = 5.4e6;
  gen.poisson = 0.45;
  gen.lame = {1.68e7, 1.86e6};
  gen.f = Vec3::Constant(2.0);
  gen.scaling = ForceScaling::MembraneData;
  gen.eps_list = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};

  ShellCase flex;
  flex.name = "flexural";
  flex.kind = ShellKind::Flexural;
  flex.chart = "cone";
  flex.chart_params = {{"b", 0.2}, {"c", 0.4}};
  flex.rect = {0.0, pi, 0.4, 1.0};
  flex.boundary = BoundarySpec::edges({RectSide::Left});
  flex.young = 5.4e6;
  flex.poisson = 0.45;
  flex.lame = {1.68e7, 1.86e6};
  flex.f = Vec3::Constant(80.0);
  flex.scaling = ForceScaling::FlexuralData;
  flex.eps_list = {5.02655e-1, 5.02655e-2, 5.02655e-3, 5.02655e-4, 5.02655e-5, 5.02655e-6};
  return {ell, gen, flex};
}

ShellCase builtin_case(const std::string& name) {
  for (auto& c : builtin_cases())
    if (c.name == name) return c;
  throw ConfigError("unknown case '" + name + "' (elliptic, generalized, flexural)");
}

ShellLoad physical_load(const ShellCase& c, double eps) {
  const double sf = c.scaling == ForceScaling::MembraneData ? 1.0 : eps * eps;
  const double sh = c.scaling == ForceScaling::MembraneData ? eps : eps * eps * eps;
  return {sf * c.f, sh * c.h, sh * c.h};
}

ShellLoad limit_load(const ShellCase& c) { return {c.f, c.h, c.h}; }

// ---------------------------------------------------------------------------

CartesianJet cartesian_jet(const SurfaceGeometry& g, const SurfaceSample& s) {
  CartesianJet j;
  const Vec3& a3 = g.base[2];
  for (int a = 0; a < 2; ++a) {
    j.T += s.eta[a] * g.dual[a];
    for (int b = 0; b < 2; ++b) j.dT[b] += s.d_eta[a][b] * g.dual[a] + s.eta[a] * g.d_dual[b][a];
  }
  j.N = s.eta[2] * a3;
  for (int b = 0; b < 2; ++b) {
    j.dN[b] = s.d_eta[2][b] * a3 + s.eta[2] * g.d_a3[b];
    for (int c = 0; c < 2; ++c)
      j.ddN[b][c] = s.dd_eta[2](b, c) * a3 + s.d_eta[2][b] * g.d_a3[c] + s.d_eta[2][c] * g.d_a3[b] +
                    s.eta[2] * g.dd_a3[b][c];
  }
  return j;
}

SamplePoints sample_points(const Chart& chart, std::shared_ptr<const TriMesh> mesh, int degree) {
  SamplePoints p;
  p.mesh = mesh;
  const auto rule = macro_rule(triangle_rule(degree));
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const auto& tri = mesh->triangles[t];
    const double detJ = 2.0 * mesh->signed_area(t);
    for (const auto& q : rule) {
      p.tri.push_back(t);
      p.local.push_back(q);
      p.y.push_back(q.bary[0] * mesh->vertices[tri[0]] + q.bary[1] * mesh->vertices[tri[1]] +
                    q.bary[2] * mesh->vertices[tri[2]]);
      p.w.push_back(q.w * detJ);
    }
  }
  p.geom.resize(p.y.size());
  detail::parallel_for(p.size(), [&](int i) { p.geom[i] = surface_at(chart, p.y[i]); });
  return p;
}

std::vector<CartesianJet> sample_surface_field(const DiscreteField& field, const SamplePoints& pts) {
  if (field.layout->space(0).tri_mesh_ptr() != pts.mesh)
    throw MeshMismatch("surface field and sample points live on different meshes");
  std::vector<CartesianJet> out(pts.size());
  detail::parallel_for(pts.size(), [&](int i) {
    out[i] = cartesian_jet(pts.geom[i], sample_surface(field, pts.tri[i], pts.local[i].bary, pts.local[i].sub));
  });
  return out;
}

namespace {

// Average and y-derivatives of u_i g^i over x3 in (-1, 1) at one point.
void average_at(const DiscreteField& u3d, const PrismMesh& pm, int tri, const Vec3& bary, const SurfaceGeometry& s,
                double eps, const GaussRule& gauss, Vec3& u, std::array<Vec3, 2>& du) {
  u.setZero();
  du = {Vec3::Zero(), Vec3::Zero()};
  for (int l = 0; l < pm.layers; ++l) {
    const double z0 = pm.z[l], dz = pm.z[l + 1] - pm.z[l];
    for (std::size_t k = 0; k < gauss.x.size(); ++k) {
      const double x3 = z0 + 0.5 * (gauss.x[k] + 1.0) * dz;
      const double w = 0.5 * gauss.w[k] * 0.5 * dz;  // (1/2) int dx3
      const auto v = sample_volume(u3d, tri * pm.layers + l, bary, x3);
      const auto g = volume_at(s, x3, eps);
      for (int i = 0; i < 3; ++i) {
        u += w * v.v[i] * g.g_dual[i];
        for (int b = 0; b < 2; ++b) {
          Vec3 dgi = Vec3::Zero();  // d_b g^i = -Gamma^i_{bq} g^q
          for (int q = 0; q < 3; ++q) dgi -= g.christoffel3[i](b, q) * g.g_dual[q];
          du[b] += w * (v.d_v(i, b) * g.g_dual[i] + v.v[i] * dgi);
        }
      }
    }
  }
}

CartesianJet split(const SurfaceGeometry& s, const Vec3& u, const std::array<Vec3, 2>& du) {
  CartesianJet j;
  const Vec3& a3 = s.base[2];
  const double un = u.dot(a3);
  j.N = un * a3;
  j.T = u - j.N;
  for (int b = 0; b < 2; ++b) {
    const double dun = du[b].dot(a3) + u.dot(s.d_a3[b]);
    j.dN[b] = dun * a3 + un * s.d_a3[b];
    j.dT[b] = du[b] - j.dN[b];
  }
  return j;
}

}  // namespace

std::vector<CartesianJet> average_through_thickness(const DiscreteField& u3d, const Chart& chart, double eps,
                                                    const SamplePoints& pts, int gauss_per_layer) {
  (void)chart;
  const PrismMesh& pm = u3d.layout->space(0).prism_mesh();
  const TriLocator locator(pm.base);
  const GaussRule gauss = gauss_legendre(gauss_per_layer);
  std::vector<CartesianJet> out(pts.size());
  detail::parallel_for(pts.size(), [&](int i) {
    const auto hit = locator.locate(pts.y[i]);
    Vec3 u;
    std::array<Vec3, 2> du;
    average_at(u3d, pm, hit.triangle, hit.bary, pts.geom[i], eps, gauss, u, du);
    out[i] = split(pts.geom[i], u, du);
  });
  return out;
}

std::string ErrorNorm::describe() const {
  static const char* n[] = {"L2", "H1", "H2"};
  return std::string("T:H1+N:") + n[transverse_order];
}

namespace {

double density(const CartesianJet& a, const CartesianJet* b, int order) {
  auto d = [&](auto member) {
    return b ? Vec3(member(a) - member(*b)) : Vec3(member(a));
  };
  double s = d([](const CartesianJet& j) { return j.T; }).squaredNorm() +
             d([](const CartesianJet& j) { return j.N; }).squaredNorm();
  for (int x = 0; x < 2; ++x) {
    s += d([x](const CartesianJet& j) { return j.dT[x]; }).squaredNorm();
    if (order >= 1) s += d([x](const CartesianJet& j) { return j.dN[x]; }).squaredNorm();
    if (order >= 2)
      for (int y = 0; y < 2; ++y) s += d([x, y](const CartesianJet& j) { return j.ddN[x][y]; }).squaredNorm();
  }
  return s;
}

}  // namespace

double field_norm(const std::vector<CartesianJet>& a, const SamplePoints& pts, ErrorNorm norm) {
  if (static_cast<int>(a.size()) != pts.size()) throw MeshMismatch("field sampled on a different point set");
  double s = 0.0;
  for (int i = 0; i < pts.size(); ++i) s += pts.w[i] * density(a[i], nullptr, norm.transverse_order);
  return std::sqrt(s);
}

ErrorValue error_norm(const std::vector<CartesianJet>& a, const std::vector<CartesianJet>& b,
                      const SamplePoints& pts, ErrorNorm norm) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != pts.size())
    throw MeshMismatch("fields sampled on different point sets");
  double s = 0.0;
  for (int i = 0; i < pts.size(); ++i) s += pts.w[i] * density(a[i], &b[i], norm.transverse_order);
  ErrorValue e;
  e.absolute = std::sqrt(s);
  const double ref = field_norm(b, pts, norm);
  e.relative = ref > 0.0 ? e.absolute / ref : e.absolute;
  return e;
}

// ---------------------------------------------------------------------------

namespace {

double mean_free_diag(const SparseMatrix& A, const std::vector<char>& constrained) {
  double s = 0.0;
  int n = 0;
  for (int i = 0; i < A.rows(); ++i)
    if (!constrained[i]) s += A.coeff(i, i), ++n;
  return n ? s / n : 1.0;
}

}  // namespace

CaseOperators build_operators(const ShellCase& c) {
  CaseOperators ops;
  ops.chart = c.make_chart();
  ops.mesh = std::make_shared<const TriMesh>(structured_tri(c.rect, c.mesh.n1, c.mesh.n2, c.boundary));
  const auto tang = FunctionSpace::lagrange_tri(ops.mesh, c.tangential_order);
  ops.koiter_layout = std::make_shared<MixedSpace>(std::vector<SpacePtr>{tang, tang, FunctionSpace::reduced_hct(ops.mesh)});
  for (int i = 0; i < 3; ++i) ops.koiter_layout->clamp(i, c.boundary);
  ops.koiter = assemble_surface_operators(*ops.chart, c.lame, *ops.koiter_layout, c.quad, true);
  ops.penalty_scale = mean_free_diag(ops.koiter.F, ops.koiter_layout->constrained()) /
                      mean_free_diag(ops.koiter.M, ops.koiter_layout->constrained());
  if (c.kind == ShellKind::EllipticMembrane) {
    ops.limit_layout =
        std::make_shared<MixedSpace>(std::vector<SpacePtr>{tang, tang, FunctionSpace::lagrange_tri(ops.mesh, 1)});
    ops.limit_layout->clamp(0, c.boundary);
    ops.limit_layout->clamp(1, c.boundary);
    assemble_limit_membrane(*ops.chart, c.lame, limit_load(c), *ops.limit_layout, c.quad);  // ellipticity check
    ops.limit = assemble_surface_operators(*ops.chart, c.lame, *ops.limit_layout, c.quad, false);
  }
  return ops;
}

PenaltyStudy penalty_study(const ShellCase& c, const CaseOperators& ops, const std::vector<double>& relative,
                           const SolveHook& hook) {
  PenaltyStudy s;
  for (double r : relative) {
    const double p = r * ops.penalty_scale;
    const auto sys = penalized_system(ops.koiter, p, limit_load(c), *ops.koiter_layout);
    SolveReport rep;
    auto u = solve(sys, ops.koiter_layout, c.solver, &rep);
    if (hook) hook(fmt::format("penalty {:.3e}", p), sys, rep);
    s.penalty.push_back(p);
    s.energy.push_back(sys.rhs.dot(u.coef));
    s.solution.push_back(std::move(u));
  }
  return s;
}

DiscreteField extrapolate_penalty(const DiscreteField& u1, double p1, const DiscreteField& u2, double p2) {
  if (u1.layout != u2.layout) throw MeshMismatch("penalty solutions on different layouts");
  return {u1.layout, (p2 * u2.coef - p1 * u1.coef) / (p2 - p1)};
}

EnergySplit energy_split(const CaseOperators& ops, const DiscreteField& u, double eps) {
  EnergySplit e;
  e.membrane = eps * u.coef.dot(ops.koiter.M * u.coef);
  e.flexural = eps * eps * eps * u.coef.dot(ops.koiter.F * u.coef);
  return e;
}

CaseResult run_case(const ShellCase& c, const RunOptions& opts) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  auto log = [&](const std::string& m) {
    if (opts.log) opts.log(m);
  };
  CaseResult result;
  result.shell = c;
  const auto ops = build_operators(c);
  result.penalty_scale = ops.penalty_scale;
  const SamplePoints pts = sample_points(*ops.chart, ops.mesh);
  const double focal = min_curvature_radius(*ops.chart);

  const ErrorNorm norm_lk{c.kind == ShellKind::Flexural ? 2 : 0};
  const ErrorNorm norm_3d{c.kind == ShellKind::Flexural ? 1 : 0};

  SolveReport limit_rep;
  auto limit_hook = [&](const std::string& label, const SparseSystem& sys, const SolveReport& rep) {
    if (rep.residual >= limit_rep.residual) limit_rep = rep;
    if (opts.on_solve) opts.on_solve(c.name + " limit " + label, sys, rep);
  };
  std::optional<DiscreteField> limit;
  std::vector<CartesianJet> limit_jets;
  try {
    if (c.kind == ShellKind::EllipticMembrane) {
      SolveReport rep;
      const auto sys =
          constrain(ops.limit.M, surface_rhs(ops.limit, 2.0 * c.f + 2.0 * c.h), ops.limit_layout->constrained());
      limit = solve(sys, ops.limit_layout, c.solver, &rep);
      limit_hook("membrane", sys, rep);
      result.limit_method = "membrane limit (P2, P2 tangential, P1 transverse without boundary condition)";
    } else if (c.kind == ShellKind::Flexural) {
      const auto study = penalty_study(c, ops, {c.penalty, 100.0 * c.penalty}, limit_hook);
      result.penalties = study.penalty;
      result.penalty_energies = study.energy;
      limit = extrapolate_penalty(study.solution[0], study.penalty[0], study.solution[1], study.penalty[1]);
      result.limit_method = fmt::format("penalized flexural limit extrapolated from penalties {:.3e} and {:.3e}",
                                        study.penalty[0], study.penalty[1]);
    } else {
      result.limit_method = "none";
    }
    result.limit_residual = limit_rep.residual;
    result.limit_floor = limit_rep.rounding_floor;
  } catch (const Error& e) {
    limit.reset();
    result.limit_method = std::string("failed: ") + e.what();
    log(fmt::format("{}: limit problem {}", c.name, result.limit_method));
  }
  if (limit) limit_jets = sample_surface_field(*limit, pts);

  const auto base3 = structured_tri(c.rect, c.mesh.n1_3d, c.mesh.n2_3d, c.boundary);
  const auto prism = std::make_shared<const PrismMesh>(extrude(base3, c.mesh.layers));

  for (double eps : c.eps_list) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow row;
    row.eps = eps;
    row.beyond_focal = eps >= focal;
    row.norm_lk = limit ? norm_lk.describe() : "NA";
    row.norm_3d = norm_3d.describe();
    try {
      const ShellLoad load = physical_load(c, eps);
      SolveReport rep;
      const auto ksys = koiter_system(ops.koiter, eps, load, *ops.koiter_layout);
      const auto koiter = solve(ksys, ops.koiter_layout, c.solver, &rep);
      if (opts.on_solve) opts.on_solve(fmt::format("{} koiter eps={:g}", c.name, eps), ksys, rep);
      row.max_residual = rep.residual;
      row.residual_floor = rep.rounding_floor;
      row.ndof_koiter = ops.koiter_layout->ndof();
      const auto es = energy_split(ops, koiter, eps);
      row.membrane_fraction = es.membrane_fraction();
      row.flexural_fraction = es.flexural_fraction();
      const auto kj = sample_surface_field(koiter, pts);
      if (limit) {
        row.ndof_limit = limit->layout->ndof();
        row.err_lk = error_norm(kj, limit_jets, pts, norm_lk);
      }

      const auto space = FunctionSpace::lagrange_prism(prism, c.prism_order, ThicknessBasis::ScaledHierarchical, eps);
      const auto layout3 = std::make_shared<MixedSpace>(std::vector<SpacePtr>{space, space, space});
      for (int i = 0; i < 3; ++i) layout3->clamp(i, c.boundary);
      const auto sys3 = assemble_3d_scaled(*ops.chart, c.lame, eps, load, *layout3, c.quad);
      const auto u3 = solve(sys3, layout3, c.solver, &rep);
      if (opts.on_solve) opts.on_solve(fmt::format("{} 3d eps={:g}", c.name, eps), sys3, rep);
      row.max_residual = std::max(row.max_residual, rep.residual);
      row.residual_floor = std::max(row.residual_floor, rep.rounding_floor);
      row.ndof_3d = layout3->ndof();
      const auto avg = average_through_thickness(u3, *ops.chart, eps, pts);

      row.err_3dk = error_norm(kj, avg, pts, norm_3d);
      if (limit) row.err_3dl = error_norm(avg, limit_jets, pts, norm_3d);
      if (opts.on_fields) opts.on_fields({eps, &koiter, &u3, limit ? &*limit : nullptr});
    } catch (const Error& e) {
      row.status = e.what();  // "Kind: message"
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log(fmt::format("{} eps={:.6g} LK={} 3DK={} 3DL={} ({:.1f}s) {}", c.name, eps,
                    row.err_lk ? fmt::format("{:.4e}", row.err_lk->relative) : "NA",
                    row.err_3dk ? fmt::format("{:.4e}", row.err_3dk->relative) : "NA",
                    row.err_3dl ? fmt::format("{:.4e}", row.err_3dl->relative) : "NA", row.wall_seconds, row.status));
    result.rows.push_back(std::move(row));
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------

namespace {

const char* kColumns[] = {"case",         "kind",         "eps",          "err_lk",      "err_3dk",
                          "err_3dl",      "err_lk_abs",   "err_3dk_abs",  "err_3dl_abs", "norm_lk",
                          "norm_3d",      "ndof_koiter",  "ndof_3d",      "ndof_limit",  "membrane_fraction",
                          "flexural_fraction", "max_residual", "residual_floor", "beyond_focal", "limit_method",
                          "status"};

std::string num(double v) { return fmt::format("{:.16e}", v); }
std::string opt(const std::optional<ErrorValue>& e, bool abs) {
  return e ? num(abs ? e->absolute : e->relative) : "NA";
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_quotes) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
      else if (ch == '"') in_quotes = false;
      else cur += ch;
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string table_header() {
  std::string h;
  for (const char* c : kColumns) h += (h.empty() ? "" : ",") + std::string(c);
  return h + "\n";
}

std::string export_table(const CaseResult& r) {
  std::string out = table_header();
  for (const auto& row : r.rows) {
    const std::vector<std::string> f = {r.shell.name,
                                        to_string(r.shell.kind),
                                        num(row.eps),
                                        opt(row.err_lk, false),
                                        opt(row.err_3dk, false),
                                        opt(row.err_3dl, false),
                                        opt(row.err_lk, true),
                                        opt(row.err_3dk, true),
                                        opt(row.err_3dl, true),
                                        row.norm_lk,
                                        row.norm_3d,
                                        std::to_string(row.ndof_koiter),
                                        std::to_string(row.ndof_3d),
                                        std::to_string(row.ndof_limit),
                                        num(row.membrane_fraction),
                                        num(row.flexural_fraction),
                                        num(row.max_residual),
                                        num(row.residual_floor),
                                        row.beyond_focal ? "1" : "0",
                                        r.limit_method,
                                        row.status};
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + quote(f[i]);
    out += "\n";
  }
  return out;
}

std::vector<ResultRow> parse_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line + "\n" != table_header()) throw IoError("unexpected CSV header");
  std::vector<ResultRow> rows;
  constexpr std::size_t ncol = std::size(kColumns);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != ncol) throw IoError(fmt::format("CSV row has {} fields, expected {}", f.size(), ncol));
    auto d = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    auto e = [&](int rel, int abs) -> std::optional<ErrorValue> {
      if (f[rel] == "NA") return std::nullopt;
      return ErrorValue{d(f[abs]), d(f[rel])};
    };
    ResultRow r;
    r.eps = d(f[2]);
    r.err_lk = e(3, 6);
    r.err_3dk = e(4, 7);
    r.err_3dl = e(5, 8);
    r.norm_lk = f[9];
    r.norm_3d = f[10];
    r.ndof_koiter = std::stoi(f[11]);
    r.ndof_3d = std::stoi(f[12]);
    r.ndof_limit = std::stoi(f[13]);
    r.membrane_fraction = d(f[14]);
    r.flexural_fraction = d(f[15]);
    r.max_residual = d(f[16]);
    r.residual_floor = d(f[17]);
    r.beyond_focal = f[18] == "1";
    r.status = f[20];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string export_vtk(const TriMesh& mesh, const Chart& chart, const std::vector<Vec3>& u, const std::string& title) {
  if (static_cast<int>(u.size()) != mesh.num_vertices()) throw MeshMismatch("one displacement per vertex expected");
  std::string out = "# vtk DataFile Version 3.0\n" + title + "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += fmt::format("POINTS {} double\n", mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 x = chart.map(mesh.vertices[v]) + u[v];
    out += fmt::format("{:.9e} {:.9e} {:.9e}\n", x[0], x[1], x[2]);
  }
  out += fmt::format("CELLS {} {}\n", mesh.num_triangles(), 4 * mesh.num_triangles());
  for (const auto& t : mesh.triangles) out += fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
  out += fmt::format("CELL_TYPES {}\n", mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) out += "5\n";
  out += fmt::format("POINT_DATA {}\nVECTORS displacement double\n", mesh.num_vertices());
  for (const auto& d : u) out += fmt::format("{:.9e} {:.9e} {:.9e}\n", d[0], d[1], d[2]);
  return out;
}

namespace {

// a triangle containing each vertex and the vertex's local index there
std::vector<std::pair<int, int>> vertex_owner(const TriMesh& mesh) {
  std::vector<std::pair<int, int>> own(mesh.num_vertices(), {-1, -1});
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      if (own[mesh.triangles[t][k]].first < 0) own[mesh.triangles[t][k]] = {t, k};
  return own;
}

}  // namespace

std::vector<Vec3> vertex_displacement(const DiscreteField& field, const Chart& chart) {
  const TriMesh& mesh = field.layout->space(0).tri_mesh();
  const auto own = vertex_owner(mesh);
  std::vector<Vec3> out(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Vec3 l = Vec3::Zero();
    l[own[v].second] = 1.0;
    const auto j = cartesian_jet(surface_at(chart, mesh.vertices[v]), sample_surface(field, own[v].first, l));
    out[v] = j.T + j.N;
  }
  return out;
}

std::vector<Vec3> vertex_average(const DiscreteField& u3d, const Chart& chart, double eps, int gauss_per_layer) {
  const PrismMesh& pm = u3d.layout->space(0).prism_mesh();
  const auto own = vertex_owner(pm.base);
  const GaussRule gauss = gauss_legendre(gauss_per_layer);
  std::vector<Vec3> out(pm.base.num_vertices());
  for (int v = 0; v < pm.base.num_vertices(); ++v) {
    Vec3 l = Vec3::Zero();
    l[own[v].second] = 1.0;
    std::array<Vec3, 2> du;
    average_at(u3d, pm, own[v].first, l, surface_at(chart, pm.base.vertices[v]), eps, gauss, out[v], du);
  }
  return out;
}

}  // namespace koiter
