#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "koiter/kinematics.hpp"
#include "koiter/spaces.hpp"

namespace koiter {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Quadrature degrees. `tri` applies per HCT sub-triangle when a C1 space is
/// involved; `prism` is the in-plane degree of prism rules (the line factor
/// uses the same exactness). `membrane` < 0 means "same as tri".
struct QuadSpec {
  int tri = 6;
  int prism = 4;
  int membrane = -1;  // degree for B_M; -1 uses tri
};

enum class AssemblyMode { Serial, Parallel };

/// Block layout of a vector-valued field: component c occupies global dofs
/// [offset(c), offset(c) + space(c).ndof()).
class MixedSpace {
 public:
  explicit MixedSpace(std::vector<SpacePtr> components);

  int num_components() const { return static_cast<int>(comps_.size()); }
  const FunctionSpace& space(int c) const { return *comps_[c]; }
  SpacePtr space_ptr(int c) const { return comps_[c]; }
  int offset(int c) const { return offsets_[c]; }
  int ndof() const { return offsets_.back(); }
  bool is_prism() const { return comps_.front()->is_prism(); }
  int num_cells() const { return comps_.front()->num_cells(); }

  /// Global dofs of a cell, component blocks concatenated.
  void cell_dofs(int cell, std::vector<int>& out) const;

  /// Marks component c's dofs on gamma_0 as constrained.
  void clamp(int c, const BoundarySpec& boundary);
  const std::vector<char>& constrained() const { return constrained_; }
  int num_constrained() const;

 private:
  std::vector<SpacePtr> comps_;
  std::vector<int> offsets_;
  std::vector<char> constrained_;
};

using LayoutPtr = std::shared_ptr<MixedSpace>;

/// Dofs of `space` carried by gamma_0 under `boundary`: Lagrange nodes on
/// clamped edges, all three vertex dofs of reduced HCT (value and gradient
/// vanish, hence eta_3 = d_nu eta_3 = 0 along the edge), and every prism dof
/// whose base node lies on a clamped edge.
std::vector<int> apply_clamping(const FunctionSpace& space, const BoundarySpec& boundary);

struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<char> constrained;
  int ndof() const { return static_cast<int>(rhs.size()); }
};

struct DiscreteField {
  LayoutPtr layout;
  Eigen::VectorXd coef;
};

/// Physical (or, for the limit problems, scaled) load densities, constant
/// over the shell: body force components f^i and surface force components h^i
/// on the upper and lower faces.
struct ShellLoad {
  Vec3 f = Vec3::Zero();
  Vec3 h_plus = Vec3::Zero();
  Vec3 h_minus = Vec3::Zero();
};

/// Unconstrained surface operators on a (P, P, C1-or-P) layout: M = B_M,
/// F = B_F (empty when not requested) and load[i] = int phi sqrt(a) dy for the
/// dofs of component i, so that int p^i eta_i sqrt(a) dy = sum_i p^i load[i].
struct SurfaceOperators {
  SparseMatrix M, F;
  std::array<Eigen::VectorXd, 3> load;
};

SurfaceOperators assemble_surface_operators(const Chart& chart, Lame lame, const MixedSpace& layout,
                                            const QuadSpec& quad, bool with_flexural,
                                            AssemblyMode mode = AssemblyMode::Parallel);

/// B_M contribution, unconstrained. Throws SpaceMeshMismatch.
SparseMatrix assemble_membrane(const Chart& chart, Lame lame, const MixedSpace& layout, const QuadSpec& quad = {},
                               AssemblyMode mode = AssemblyMode::Parallel);

/// B_F contribution (with its factor 1/3), unconstrained. Throws
/// WrongTransverseSpace unless the third component is C1.
SparseMatrix assemble_flexural(const Chart& chart, Lame lame, const MixedSpace& layout, const QuadSpec& quad = {},
                               AssemblyMode mode = AssemblyMode::Parallel);

/// eps B_M + eps^3 B_F with rhs int p^{i,eps} eta_i sqrt(a) dy, where
/// p^{i,eps} = 2 eps f^{i,eps} + h_+^{i,eps} + h_-^{i,eps}; constraints applied.
SparseSystem assemble_koiter(const Chart& chart, Lame lame, double eps, const ShellLoad& load,
                             const MixedSpace& layout, const QuadSpec& quad = {},
                             AssemblyMode mode = AssemblyMode::Parallel);

/// Same system from operators assembled once.
SparseSystem koiter_system(const SurfaceOperators& ops, double eps, const ShellLoad& load, const MixedSpace& layout);

/// Scaled 3D problem P(eps; Omega): int A(eps) e(eps; u) e(eps; v) sqrt(g) dx =
/// int f^i v_i sqrt(g) dx + (1/eps) int_{Gamma+-} h^i v_i sqrt(g) dy, with the
/// physical densities f^{i,eps}, h^{i,eps}. Constraints applied.
SparseSystem assemble_3d_scaled(const Chart& chart, Lame lame, double eps, const ShellLoad& load,
                                const MixedSpace& layout, const QuadSpec& quad = {},
                                AssemblyMode mode = AssemblyMode::Parallel);

/// Limit membrane problem P_M: B_M u = int p^i eta_i sqrt(a) dy with
/// p^i = 2 f^i + h_+^i + h_-^i (scaled data). Throws NotElliptic when the
/// Gaussian curvature is not positive at some quadrature point.
SparseSystem assemble_limit_membrane(const Chart& chart, Lame lame, const ShellLoad& load, const MixedSpace& layout,
                                     const QuadSpec& quad = {}, AssemblyMode mode = AssemblyMode::Parallel);

/// Penalized flexural limit problem: (B_F + penalty B_M) u = int p^i eta_i
/// sqrt(a) dy. Throws InvalidPenalty unless penalty is positive and finite.
SparseSystem assemble_limit_flexural_penalized(const Chart& chart, Lame lame, const ShellLoad& load,
                                               const MixedSpace& layout, const QuadSpec& quad, double penalty,
                                               AssemblyMode mode = AssemblyMode::Parallel);
SparseSystem penalized_system(const SurfaceOperators& ops, double penalty, const ShellLoad& load,
                              const MixedSpace& layout);

/// Zeroes constrained rows and columns, puts 1 on their diagonal and 0 in the rhs.
SparseSystem constrain(SparseMatrix matrix, Eigen::VectorXd rhs, const std::vector<char>& constrained);

/// Surface right-hand side sum_i p^i load[i].
Eigen::VectorXd surface_rhs(const SurfaceOperators& ops, const Vec3& p);

/// Pointwise values of a surface field in covariant components.
struct SurfaceSample {
  Vec3 eta = Vec3::Zero();
  std::array<Vec2, 3> d_eta{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<Mat2, 3> dd_eta{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
};
SurfaceSample sample_surface(const DiscreteField& field, int tri, const Vec3& bary, int sub = -1);

/// Pointwise values of a prism field: v_i and d_j v_i (d_3 with respect to x3).
VolumeDisplacementJet sample_volume(const DiscreteField& field, int cell, const Vec3& bary, double x3);

}  // namespace koiter
