#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "koiter/fem.hpp"
#include "koiter/solver.hpp"

namespace koiter {

enum class ShellKind { EllipticMembrane, GeneralizedMembrane, Flexural };
enum class ForceScaling { MembraneData, FlexuralData };

std::string to_string(ShellKind k);
std::string to_string(ForceScaling s);

struct MeshResolution {
  int n1 = 32, n2 = 32;          // Koiter and limit meshes
  int n1_3d = 16, n2_3d = 16;    // base of the 3D mesh
  int layers = 4;
};

struct ShellCase {
  std::string name;
  ShellKind kind = ShellKind::EllipticMembrane;
  std::string chart;
  std::map<std::string, double> chart_params;
  ParamRect rect;
  BoundarySpec boundary;
  double young = 0.0, poisson = 0.0;
  Lame lame;
  // densities as listed for the case: f^i, h^i of the scaled data
  Vec3 f = Vec3::Zero();
  Vec3 h = Vec3::Zero();
  ForceScaling scaling = ForceScaling::MembraneData;
  std::vector<double> eps_list;
  MeshResolution mesh;
  // flexural limit: penalty in units of the B_F / B_M diagonal ratio
  double penalty = 1e6;
  int tangential_order = 2;
  int prism_order = 2;
  QuadSpec quad;
  // sweeps keep going when a solve is limited by rounding; the residuals are
  // still recorded per row
  SolverOptions solver{.accept_rounding_floor = true};

  ChartPtr make_chart() const;
  /// Throws ConfigError on inconsistent data (including lambda, mu off the
  /// values implied by E, nu by more than 2%).
  void validate() const;
};

std::vector<ShellCase> builtin_cases();
ShellCase builtin_case(const std::string& name);

/// Physical densities f^{i,eps}, h^{i,eps} for a given eps.
ShellLoad physical_load(const ShellCase& c, double eps);
/// Scaled densities driving the limit problems.
ShellLoad limit_load(const ShellCase& c);

// ---------------------------------------------------------------------------
// Fields in Cartesian form on the comparison mesh

/// Cartesian field split as T = zeta_a a^a (tangential) and N = zeta_3 a^3
/// with first derivatives, and second derivatives of N when available.
struct CartesianJet {
  Vec3 T = Vec3::Zero(), N = Vec3::Zero();
  std::array<Vec3, 2> dT{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> dN{Vec3::Zero(), Vec3::Zero()};
  std::array<std::array<Vec3, 2>, 2> ddN{};
};

CartesianJet cartesian_jet(const SurfaceGeometry& g, const SurfaceSample& s);

/// Quadrature points on the comparison mesh (the Koiter mesh), with the
/// geometry already evaluated.
struct SamplePoints {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<int> tri;
  std::vector<MacroPoint> local;
  std::vector<Vec2> y;
  std::vector<double> w;  // dy weights
  std::vector<SurfaceGeometry> geom;
  int size() const { return static_cast<int>(w.size()); }
};
SamplePoints sample_points(const Chart& chart, std::shared_ptr<const TriMesh> mesh, int degree = 8);

std::vector<CartesianJet> sample_surface_field(const DiscreteField& field, const SamplePoints& pts);

/// Through-thickness average (1/2eps) int u_i g^{i,eps} dx3^eps =
/// (1/2) int_{-1}^{1} u_i g^i(eps) dx3 at every sample point, resolved in
/// Cartesian components together with its y-derivatives.
std::vector<CartesianJet> average_through_thickness(const DiscreteField& u3d, const Chart& chart, double eps,
                                                    const SamplePoints& pts, int gauss_per_layer = 4);

/// Norm used for the transverse part N: 0 -> L2, 1 -> H1, 2 -> H2.
struct ErrorNorm {
  int transverse_order = 0;
  std::string describe() const;
};

struct ErrorValue {
  double absolute = 0.0;
  double relative = 0.0;
};

/// ||A - B|| with T measured in H1 and N in the order given, relative to ||B||.
ErrorValue error_norm(const std::vector<CartesianJet>& a, const std::vector<CartesianJet>& b,
                      const SamplePoints& pts, ErrorNorm norm);
double field_norm(const std::vector<CartesianJet>& a, const SamplePoints& pts, ErrorNorm norm);

// ---------------------------------------------------------------------------
// Sweeps

struct ResultRow {
  double eps = 0.0;
  std::optional<ErrorValue> err_lk, err_3dk, err_3dl;
  std::string norm_lk, norm_3d;
  int ndof_koiter = 0, ndof_3d = 0, ndof_limit = 0;
  double membrane_fraction = 0.0;  // eps B_M / (eps B_M + eps^3 B_F) on the Koiter solution
  double flexural_fraction = 0.0;
  double max_residual = 0.0;
  double residual_floor = 0.0;  // largest rounding floor among this row's solves
  bool beyond_focal = false;  // eps at or past the smallest radius of curvature
  double wall_seconds = 0.0;
  std::string status = "ok";
};

struct RowFields {
  double eps;
  const DiscreteField* koiter;
  const DiscreteField* three_d;
  const DiscreteField* limit;  // null for the generalized membrane case
};

/// Observer of every linear solve: label, system and report.
using SolveHook = std::function<void(const std::string&, const SparseSystem&, const SolveReport&)>;

struct RunOptions {
  /// Called once per eps with the solved fields (for VTK export).
  std::function<void(const RowFields&)> on_fields;
  /// Progress messages.
  std::function<void(const std::string&)> log;
  SolveHook on_solve;
};

struct CaseResult {
  ShellCase shell;
  std::vector<ResultRow> rows;
  std::string limit_method;  // how the limit solution was obtained, or why it failed
  double penalty_scale = 0.0;
  double limit_residual = 0.0, limit_floor = 0.0;
  // flexural case: compliance p . u at each absolute penalty
  std::vector<double> penalties, penalty_energies;
  double wall_seconds = 0.0;
};

CaseResult run_case(const ShellCase& c, const RunOptions& opts = {});

/// Operators for a case's Koiter and limit problems, assembled once.
struct CaseOperators {
  ChartPtr chart;
  std::shared_ptr<const TriMesh> mesh;
  LayoutPtr koiter_layout;
  SurfaceOperators koiter;
  LayoutPtr limit_layout;      // membrane limit only
  SurfaceOperators limit;
  double penalty_scale = 1.0;  // mean diag(B_F) / mean diag(B_M) on free dofs
};
CaseOperators build_operators(const ShellCase& c);

/// Flexural limit solutions of (B_F + P B_M) u = p for the given absolute
/// penalties, and their compliances p . u.
struct PenaltyStudy {
  std::vector<double> penalty;
  std::vector<double> energy;
  std::vector<DiscreteField> solution;
};
PenaltyStudy penalty_study(const ShellCase& c, const CaseOperators& ops, const std::vector<double>& relative_penalties,
                           const SolveHook& hook = {});

/// Extrapolates u(P) = u_inf + c/P from two penalties.
DiscreteField extrapolate_penalty(const DiscreteField& u1, double p1, const DiscreteField& u2, double p2);

struct EnergySplit {
  double membrane = 0.0, flexural = 0.0;  // eps B_M(u,u), eps^3 B_F(u,u)
  double membrane_fraction() const { return membrane / (membrane + flexural); }
  double flexural_fraction() const { return flexural / (membrane + flexural); }
};
EnergySplit energy_split(const CaseOperators& ops, const DiscreteField& u, double eps);

// ---------------------------------------------------------------------------
// Output

std::string export_table(const CaseResult& result);
std::string table_header();
/// Parses text written by export_table back into rows.
std::vector<ResultRow> parse_table(const std::string& csv);

/// Legacy ASCII VTK of the deformed middle surface theta(y) + U(y) sampled at
/// the mesh vertices, with U attached as point vectors.
std::string export_vtk(const TriMesh& mesh, const Chart& chart, const std::vector<Vec3>& displacement,
                       const std::string& title);
/// Vertex values of a surface field (Cartesian U = eta_i a^i).
std::vector<Vec3> vertex_displacement(const DiscreteField& field, const Chart& chart);
/// Vertex values of the through-thickness average of a 3D field.
std::vector<Vec3> vertex_average(const DiscreteField& u3d, const Chart& chart, double eps, int gauss_per_layer = 4);

}  // namespace koiter
