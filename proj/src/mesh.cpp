#include "koiter/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "koiter/errors.hpp"

namespace koiter {

std::string to_string(RectSide side) {
  switch (side) {
    case RectSide::Bottom: return "bottom";
    case RectSide::Right: return "right";
    case RectSide::Top: return "top";
    case RectSide::Left: return "left";
  }
  return "?";
}

RectSide parse_side(const std::string& text) {
  static const std::map<std::string, RectSide> names = {
      {"bottom", RectSide::Bottom}, {"y2=min", RectSide::Bottom}, {"y2=0", RectSide::Bottom},
      {"right", RectSide::Right},   {"y1=max", RectSide::Right},  {"top", RectSide::Top},
      {"y2=max", RectSide::Top},    {"left", RectSide::Left},     {"y1=min", RectSide::Left},
      {"y1=0", RectSide::Left}};
  auto it = names.find(text);
  if (it == names.end()) throw ConfigError("unknown rectangle side '" + text + "'");
  return it->second;
}

bool BoundarySpec::clamps(RectSide side) const {
  return mode == Mode::EntireBoundary || std::find(sides.begin(), sides.end(), side) != sides.end();
}

std::string BoundarySpec::describe() const {
  if (mode == Mode::EntireBoundary) return "entire";
  std::string out;
  for (auto s : sides) out += (out.empty() ? "" : "+") + to_string(s);
  return out.empty() ? "none" : out;
}

double TriMesh::signed_area(int t) const {
  const auto& [a, b, c] = triangles[t];
  const Vec2 e1 = vertices[b] - vertices[a], e2 = vertices[c] - vertices[a];
  return 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += signed_area(t);
  return s;
}

double TriMesh::boundary_length() const {
  double s = 0.0;
  for (const auto& e : boundary_edges) s += (vertices[e.v[1]] - vertices[e.v[0]]).norm();
  return s;
}

double TriMesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& tri : triangles)
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = vertices[tri[(k + 1) % 3]] - vertices[tri[k]];
      const Vec2 w = vertices[tri[(k + 2) % 3]] - vertices[tri[k]];
      m = std::min(m, std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0)));
    }
  return m;
}

MeshEdges::MeshEdges(const TriMesh& mesh) {
  std::map<std::array<int, 2>, int> index;
  tri_edge.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      int a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = index.emplace(key, static_cast<int>(edges.size()));
      if (inserted) {
        edges.push_back(key);
        edge_tri.push_back({t, -1});
      } else {
        edge_tri[it->second][1] = t;
      }
      tri_edge[t][k] = it->second;
    }
}

namespace {

void tag_edges(TriMesh& m) {
  for (auto& e : m.boundary_edges)
    e.tag = m.boundary.clamps(e.side) ? BoundaryTag::Gamma0 : BoundaryTag::FreeLateral;
}

}  // namespace

TriMesh structured_tri(const ParamRect& rect, int n1, int n2, const BoundarySpec& boundary) {
  if (n1 < 1 || n2 < 1)
    throw InvalidResolution("n1 = " + std::to_string(n1) + ", n2 = " + std::to_string(n2));
  TriMesh m;
  m.rect = rect;
  m.boundary = boundary;
  auto id = [n1](int i, int j) { return j * (n1 + 1) + i; };
  m.vertices.reserve((n1 + 1) * (n2 + 1));
  for (int j = 0; j <= n2; ++j)
    for (int i = 0; i <= n1; ++i) {
      // exact end points so boundary vertices sit on the rectangle
      const double y1 = i == n1 ? rect.y1max : rect.y1min + rect.width() * i / n1;
      const double y2 = j == n2 ? rect.y2max : rect.y2min + rect.height() * j / n2;
      m.vertices.emplace_back(y1, y2);
    }
  m.triangles.reserve(2 * n1 * n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  for (int i = 0; i < n1; ++i) m.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, RectSide::Bottom, {}});
  for (int j = 0; j < n2; ++j) m.boundary_edges.push_back({{id(n1, j), id(n1, j + 1)}, RectSide::Right, {}});
  for (int i = n1; i > 0; --i) m.boundary_edges.push_back({{id(i, n2), id(i - 1, n2)}, RectSide::Top, {}});
  for (int j = n2; j > 0; --j) m.boundary_edges.push_back({{id(0, j), id(0, j - 1)}, RectSide::Left, {}});
  tag_edges(m);
  return m;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.rect = mesh.rect;
  out.boundary = mesh.boundary;
  out.vertices = mesh.vertices;
  const MeshEdges edges(mesh);
  std::vector<int> mid(edges.num_edges());
  for (int e = 0; e < edges.num_edges(); ++e) {
    mid[e] = out.num_vertices();
    out.vertices.push_back(0.5 * (mesh.vertices[edges.edges[e][0]] + mesh.vertices[edges.edges[e][1]]));
  }
  out.triangles.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& [a, b, c] = mesh.triangles[t];
    const int ab = mid[edges.tri_edge[t][0]], bc = mid[edges.tri_edge[t][1]], ca = mid[edges.tri_edge[t][2]];
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  std::map<std::array<int, 2>, int> edge_id;
  for (int e = 0; e < edges.num_edges(); ++e) edge_id[edges.edges[e]] = e;
  for (const auto& be : mesh.boundary_edges) {
    const int m = mid[edge_id.at({std::min(be.v[0], be.v[1]), std::max(be.v[0], be.v[1])})];
    out.boundary_edges.push_back({{be.v[0], m}, be.side, be.tag});
    out.boundary_edges.push_back({{m, be.v[1]}, be.side, be.tag});
  }
  return out;
}

double PrismMesh::volume() const { return base.total_area() * (z.back() - z.front()); }

int PrismMesh::count(PrismFaceTag tag) const {
  return static_cast<int>(std::count_if(boundary_faces.begin(), boundary_faces.end(),
                                        [tag](const PrismFace& f) { return f.tag == tag; }));
}

PrismMesh extrude(const TriMesh& base, int layers) {
  if (layers < 2 || layers % 2 != 0) throw OddLayerCount("layers = " + std::to_string(layers));
  PrismMesh p;
  p.base = base;
  p.layers = layers;
  for (int l = 0; l <= layers; ++l) p.z.push_back(l == layers ? 1.0 : -1.0 + 2.0 * l / layers);
  for (int t = 0; t < base.num_triangles(); ++t) {
    p.boundary_faces.push_back({t * layers, 0, PrismFaceTag::GammaMinus});
    p.boundary_faces.push_back({t * layers + layers - 1, 1, PrismFaceTag::GammaPlus});
  }
  // lateral faces: find the owning triangle and local edge of each boundary edge
  const MeshEdges edges(base);
  std::map<std::array<int, 2>, int> edge_id;
  for (int e = 0; e < edges.num_edges(); ++e) edge_id[edges.edges[e]] = e;
  for (const auto& be : base.boundary_edges) {
    const int e = edge_id.at({std::min(be.v[0], be.v[1]), std::max(be.v[0], be.v[1])});
    const int t = edges.edge_tri[e][0];
    int k = 0;
    while (edges.tri_edge[t][k] != e) ++k;
    const auto tag = be.tag == BoundaryTag::Gamma0 ? PrismFaceTag::Gamma0 : PrismFaceTag::FreeLateral;
    for (int l = 0; l < layers; ++l) p.boundary_faces.push_back({t * layers + l, 2 + k, tag});
  }
  return p;
}

Vec3 barycentric(const TriMesh& mesh, int t, const Vec2& y) {
  const auto& tri = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tri[0]];
  const Vec2& b = mesh.vertices[tri[1]];
  const Vec2& c = mesh.vertices[tri[2]];
  Mat2 J;
  J.col(0) = b - a;
  J.col(1) = c - a;
  const Vec2 l = J.partialPivLu().solve(y - a);
  return {1.0 - l[0] - l[1], l[0], l[1]};
}

TriLocator::TriLocator(const TriMesh& mesh) : mesh_(&mesh) {
  const int n = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nb1_ = nb2_ = n;
  buckets_.resize(nb1_ * nb2_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 lo = mesh.vertices[mesh.triangles[t][0]], hi = lo;
    for (int k = 1; k < 3; ++k) {
      lo = lo.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      hi = hi.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    const auto b0 = bucket_of(lo), b1 = bucket_of(hi);
    for (int j = b0[1]; j <= b1[1]; ++j)
      for (int i = b0[0]; i <= b1[0]; ++i) buckets_[j * nb1_ + i].push_back(t);
  }
}

std::array<int, 2> TriLocator::bucket_of(const Vec2& y) const {
  const auto& r = mesh_->rect;
  const int i = static_cast<int>(std::floor((y[0] - r.y1min) / r.width() * nb1_));
  const int j = static_cast<int>(std::floor((y[1] - r.y2min) / r.height() * nb2_));
  return {std::clamp(i, 0, nb1_ - 1), std::clamp(j, 0, nb2_ - 1)};
}

TriLocator::Hit TriLocator::locate(const Vec2& y) const {
  const auto b = bucket_of(y);
  Hit best;
  double best_min = -1e300;
  for (int t : buckets_[b[1] * nb1_ + b[0]]) {
    const Vec3 l = barycentric(*mesh_, t, y);
    if (l.minCoeff() > best_min) {
      best_min = l.minCoeff();
      best = {t, l};
    }
  }
  return best;
}

}  // namespace koiter
