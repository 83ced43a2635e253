#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "koiter/mesh.hpp"
#include "koiter/quadrature.hpp"

namespace koiter {

enum class SpaceKind { LagrangeP1Tri, LagrangeP2Tri, ReducedHCT, LagrangeP1Prism, LagrangeP2Prism };

std::string to_string(SpaceKind kind);

/// Through-thickness basis of prism spaces. Nodal uses the piecewise Lagrange
/// hats in x3. ScaledHierarchical replaces them by {1, s*hat_1, ..., s*hat_n}
/// (hat_0 dropped), which keeps the scaled 3D stiffness well conditioned when
/// s = eps.
enum class ThicknessBasis { Nodal, ScaledHierarchical };

inline constexpr int kMaxLocal = 24;

/// Values and derivatives of the local basis functions at one point.
/// grad and hess are with respect to y; dz is d/dx3.
struct LocalBasis {
  int n = 0;
  std::array<double, kMaxLocal> val{};
  std::array<Vec2, kMaxLocal> grad{};
  std::array<Mat2, kMaxLocal> hess{};
  std::array<double, kMaxLocal> dz{};
};

/// A scalar finite-element space on a TriMesh or a PrismMesh.
///
/// Lagrange P2 triangles number vertex dofs first, then one dof per edge.
/// Local P2 nodes are the vertices followed by the midpoints of local edges
/// (0,1), (1,2), (2,0). Reduced HCT carries (value, d1, d2) at each vertex,
/// global dof 3 v + c. Prism dofs are base dof * nz + k for thickness
/// function k.
class FunctionSpace {
 public:
  static std::shared_ptr<const FunctionSpace> lagrange_tri(std::shared_ptr<const TriMesh> mesh, int order);
  static std::shared_ptr<const FunctionSpace> reduced_hct(std::shared_ptr<const TriMesh> mesh);
  static std::shared_ptr<const FunctionSpace> lagrange_prism(std::shared_ptr<const PrismMesh> mesh, int order,
                                                             ThicknessBasis basis = ThicknessBasis::Nodal,
                                                             double scale = 1.0);

  SpaceKind kind() const { return kind_; }
  bool is_prism() const { return prism_ != nullptr; }
  bool is_c1() const { return kind_ == SpaceKind::ReducedHCT; }
  int ndof() const { return ndof_; }
  int num_cells() const { return static_cast<int>(cell_ptr_.size()) - 1; }
  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + cell_ptr_[cell], static_cast<std::size_t>(cell_ptr_[cell + 1] - cell_ptr_[cell])};
  }

  const TriMesh& tri_mesh() const { return *tri_; }
  std::shared_ptr<const TriMesh> tri_mesh_ptr() const { return tri_; }
  const PrismMesh& prism_mesh() const { return *prism_; }
  std::shared_ptr<const PrismMesh> prism_mesh_ptr() const { return prism_; }
  ThicknessBasis thickness_basis() const { return tbasis_; }
  double thickness_scale() const { return tscale_; }
  int base_order() const { return order_; }
  int base_ndof() const { return base_ndof_; }
  int thickness_count() const { return nz_; }

  /// Lagrange node of a dof (2D spaces: (y1, y2, 0); prisms: (y1, y2, x3)).
  /// Only meaningful for Lagrange kinds with the nodal thickness basis.
  Vec3 node(int dof) const;

  /// Base-mesh vertex or edge that carries a 2D dof; edges are offset by the
  /// vertex count.
  int base_entity(int base_dof) const;

  /// Evaluates the local basis of triangle t (2D spaces) at barycentric l.
  /// `sub` selects the HCT sub-triangle when the point lies on an interior
  /// split; -1 picks it from l.
  void eval_tri(int t, const Vec3& l, LocalBasis& out, int sub = -1) const;

  /// Evaluates the local basis of prism cell c at base barycentric l and
  /// scaled transverse coordinate x3.
  void eval_prism(int c, const Vec3& l, double x3, LocalBasis& out) const;

  /// Values and x3-derivatives of the thickness functions active on layer l.
  struct ThicknessEval {
    int n = 0;
    std::array<int, 4> index{};
    std::array<double, 4> val{}, dz{};
  };
  ThicknessEval eval_thickness(int layer, double x3) const;

 private:
  FunctionSpace() = default;
  void build_tri_common();

  SpaceKind kind_{};
  int order_ = 1;
  int ndof_ = 0;
  int base_ndof_ = 0;
  int nz_ = 1;
  ThicknessBasis tbasis_ = ThicknessBasis::Nodal;
  double tscale_ = 1.0;
  std::shared_ptr<const TriMesh> tri_;
  std::shared_ptr<const PrismMesh> prism_;
  std::vector<int> cell_ptr_{0};
  std::vector<int> cell_dofs_;
  std::vector<int> base_cell_dofs_;  // per triangle, 3 or 6 entries
  std::vector<std::array<Vec2, 3>> grad_bary_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 2>> edges_;

  // reduced HCT: per triangle, centre, length scale, and for each of the 3
  // sub-triangles a 9 x 10 coefficient block in scaled monomials
  struct HctCell {
    Vec2 centre;
    double h;
    std::array<Eigen::Matrix<double, 9, 10>, 3> coef;
  };
  std::vector<HctCell> hct_;
  void build_hct();
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

/// Composite rule over the three HCT sub-triangles of a macro triangle.
/// Barycentric coordinates refer to the macro triangle; weights sum to 1/2.
struct MacroPoint {
  Vec3 bary;
  double w;
  int sub;
};
std::vector<MacroPoint> macro_rule(const TriRule& rule);
std::vector<MacroPoint> plain_rule(const TriRule& rule);

}  // namespace koiter
