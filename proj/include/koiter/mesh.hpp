#pragma once

#include <array>
#include <string>
#include <vector>

#include "koiter/geometry.hpp"

namespace koiter {

enum class BoundaryTag { Gamma0, FreeLateral };
enum class PrismFaceTag { Gamma0, GammaPlus, GammaMinus, FreeLateral };

/// Sides of the parameter rectangle. Bottom is y2 = y2min, Left is y1 = y1min.
enum class RectSide { Bottom, Right, Top, Left };

std::string to_string(RectSide side);
/// Accepts "bottom", "right", "top", "left" and the aliases "y2=0" style
/// used in configs ("y1=min", "y2=max", ...). Throws ConfigError.
RectSide parse_side(const std::string& text);

/// Which part of the rectangle boundary is clamped (gamma_0).
struct BoundarySpec {
  enum class Mode { EntireBoundary, EdgeSet };
  Mode mode = Mode::EntireBoundary;
  std::vector<RectSide> sides;

  static BoundarySpec entire() { return {}; }
  static BoundarySpec edges(std::vector<RectSide> s) { return {Mode::EdgeSet, std::move(s)}; }
  bool clamps(RectSide side) const;
  std::string describe() const;
};

struct BoundaryEdge {
  std::array<int, 2> v;
  RectSide side;
  BoundaryTag tag;
};

/// Conforming triangulation of a parameter rectangle. Triangles are
/// counterclockwise; boundary edges run counterclockwise around the rectangle.
/// Local edge k of a triangle joins local vertices k and (k + 1) % 3.
struct TriMesh {
  ParamRect rect;
  BoundarySpec boundary;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double signed_area(int t) const;
  double total_area() const;
  double boundary_length() const;
  double min_angle() const;
};

/// Unique edges of a TriMesh and their incidence.
struct MeshEdges {
  std::vector<std::array<int, 2>> edges;     // sorted vertex pair
  std::vector<std::array<int, 3>> tri_edge;  // triangle, local edge -> edge id
  std::vector<std::array<int, 2>> edge_tri;  // edge -> adjacent triangles (-1 if none)

  explicit MeshEdges(const TriMesh& mesh);
  int num_edges() const { return static_cast<int>(edges.size()); }
  bool is_interior(int e) const { return edge_tri[e][1] >= 0; }
};

/// Triangulation with (n1+1)(n2+1) vertices and 2 n1 n2 triangles; each grid
/// cell is split along its lower-left to upper-right diagonal.
/// Throws InvalidResolution for n1 < 1 or n2 < 1.
TriMesh structured_tri(const ParamRect& rect, int n1, int n2, const BoundarySpec& boundary);

/// Uniform red refinement: every triangle into four similar ones.
TriMesh refine(const TriMesh& mesh);

struct PrismFace {
  int cell;
  int local_face;  // 0: bottom, 1: top, 2 + k: lateral above local edge k
  PrismFaceTag tag;
};

/// Layered prisms over base x [-1, 1]. Cell c = t * layers + l is triangle t
/// times the interval [z_l, z_{l+1}].
struct PrismMesh {
  TriMesh base;
  int layers = 0;
  std::vector<double> z;  // layer interfaces, z.front() = -1, z.back() = 1
  std::vector<PrismFace> boundary_faces;

  int num_cells() const { return base.num_triangles() * layers; }
  int triangle_of(int cell) const { return cell / layers; }
  int layer_of(int cell) const { return cell % layers; }
  double volume() const;
  int count(PrismFaceTag tag) const;
};

/// Throws OddLayerCount unless layers is even and at least 2.
PrismMesh extrude(const TriMesh& base, int layers);

/// Bucket-grid point location on a TriMesh.
class TriLocator {
 public:
  explicit TriLocator(const TriMesh& mesh);

  struct Hit {
    int triangle = -1;
    Vec3 bary = Vec3::Zero();
  };
  /// Triangle containing y (ties broken by the largest minimum barycentric
  /// coordinate). Points slightly outside the rectangle snap to the nearest
  /// triangle of their bucket.
  Hit locate(const Vec2& y) const;

 private:
  const TriMesh* mesh_;
  int nb1_, nb2_;
  std::vector<std::vector<int>> buckets_;
  std::array<int, 2> bucket_of(const Vec2& y) const;
};

Vec3 barycentric(const TriMesh& mesh, int t, const Vec2& y);

}  // namespace koiter
