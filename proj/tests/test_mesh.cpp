#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "koiter/errors.hpp"
#include "koiter/mesh.hpp"

using namespace koiter;
using std::numbers::pi;

namespace {

int count_tag(const TriMesh& m, BoundaryTag tag) {
  int c = 0;
  for (const auto& e : m.boundary_edges) c += e.tag == tag;
  return c;
}

// V - E + F with F counting triangles only
int euler(const TriMesh& m) { return m.num_vertices() - MeshEdges(m).num_edges() + m.num_triangles(); }

void check_boundary_loop(const TriMesh& m) {
  // consecutive edges chain and the loop closes
  const auto& be = m.boundary_edges;
  for (std::size_t k = 0; k < be.size(); ++k) CHECK(be[k].v[1] == be[(k + 1) % be.size()].v[0]);
  // boundary edges are exactly the edges with one adjacent triangle
  const MeshEdges edges(m);
  std::set<std::array<int, 2>> from_edges, from_list;
  for (int e = 0; e < edges.num_edges(); ++e)
    if (!edges.is_interior(e)) from_edges.insert(edges.edges[e]);
  for (const auto& e : be) from_list.insert({std::min(e.v[0], e.v[1]), std::max(e.v[0], e.v[1])});
  CHECK(from_edges == from_list);
  CHECK(from_list.size() == be.size());
}

}  // namespace

TEST_CASE("smallest structured mesh") {
  const auto m = structured_tri({}, 1, 1, BoundarySpec::entire());
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(m.boundary_edges.size() == 4);
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 4);
  check_boundary_loop(m);
  CHECK_THROWS_AS(structured_tri({}, 0, 3, BoundarySpec::entire()), InvalidResolution);
}

TEST_CASE("bottom clamping counts") {
  const auto m = structured_tri({0, pi, 0, 1}, 4, 2, BoundarySpec::edges({RectSide::Bottom}));
  CHECK(count_tag(m, BoundaryTag::Gamma0) == 4);
  for (const auto& e : m.boundary_edges)
    if (e.tag == BoundaryTag::Gamma0) {
      CHECK(m.vertices[e.v[0]][1] == 0.0);
      CHECK(m.vertices[e.v[1]][1] == 0.0);
    }
}

TEST_CASE("structured meshes: counts, orientation, area, Euler") {
  for (auto [n1, n2] : {std::pair{1, 1}, {2, 3}, {7, 5}, {32, 32}}) {
    const ParamRect r{0.4, 1.9, -0.5, 0.25};
    const auto m = structured_tri(r, n1, n2, BoundarySpec::edges({RectSide::Left}));
    CHECK(m.num_vertices() == (n1 + 1) * (n2 + 1));
    CHECK(m.num_triangles() == 2 * n1 * n2);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);
    CHECK(m.total_area() == doctest::Approx(r.area()).epsilon(1e-12));
    CHECK(euler(m) == 1);
    CHECK(m.boundary_length() == doctest::Approx(2 * (r.width() + r.height())).epsilon(1e-12));
    check_boundary_loop(m);
  }
}

TEST_CASE("red refinement") {
  const auto m = structured_tri({0, pi, 0.4, 1.0}, 1, 1, BoundarySpec::edges({RectSide::Left}));
  const auto r = refine(m);
  CHECK(r.num_triangles() == 8);
  CHECK(r.total_area() == doctest::Approx(m.total_area()).epsilon(1e-14));
  CHECK(r.boundary_length() == doctest::Approx(m.boundary_length()).epsilon(1e-14));
  CHECK(r.min_angle() == doctest::Approx(m.min_angle()).epsilon(1e-12));
  CHECK(count_tag(r, BoundaryTag::Gamma0) == 2 * count_tag(m, BoundaryTag::Gamma0));
  CHECK(euler(r) == 1);
  for (int t = 0; t < r.num_triangles(); ++t) CHECK(r.signed_area(t) > 0.0);
  check_boundary_loop(r);
  const auto rr = refine(structured_tri({}, 3, 2, BoundarySpec::entire()));
  CHECK(rr.num_vertices() == 7 * 5);
  check_boundary_loop(rr);
}

TEST_CASE("extrusion") {
  const auto base = structured_tri({}, 1, 1, BoundarySpec::edges({RectSide::Bottom, RectSide::Top}));
  const auto p = extrude(base, 2);
  CHECK(p.num_cells() == 4);
  CHECK(p.count(PrismFaceTag::GammaPlus) == 2);
  CHECK(p.count(PrismFaceTag::GammaMinus) == 2);
  CHECK(p.count(PrismFaceTag::Gamma0) == 2 * 2);
  CHECK(p.count(PrismFaceTag::FreeLateral) == 2 * 2);
  CHECK(p.volume() == doctest::Approx(2.0 * base.total_area()).epsilon(1e-12));
  CHECK(p.z[1] == 0.0);
  CHECK_THROWS_AS(extrude(base, 3), OddLayerCount);
  CHECK_THROWS_AS(extrude(base, 0), OddLayerCount);

  // faces are unique and cover every boundary face exactly once
  const auto big = extrude(structured_tri({}, 4, 3, BoundarySpec::entire()), 4);
  std::set<std::pair<int, int>> seen;
  for (const auto& f : big.boundary_faces) CHECK(seen.insert({f.cell, f.local_face}).second);
  const int lateral = static_cast<int>(big.base.boundary_edges.size()) * 4;
  CHECK(big.boundary_faces.size() == static_cast<std::size_t>(2 * big.base.num_triangles() + lateral));
  CHECK(big.count(PrismFaceTag::Gamma0) == lateral);
  for (const auto& f : big.boundary_faces) {
    if (f.tag == PrismFaceTag::GammaPlus) CHECK(big.layer_of(f.cell) == 3);
    if (f.tag == PrismFaceTag::GammaMinus) CHECK(big.layer_of(f.cell) == 0);
  }
}

TEST_CASE("point location") {
  const auto m = structured_tri({0, pi, 0.4, 1.0}, 9, 7, BoundarySpec::entire());
  const TriLocator loc(m);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const Vec2 y(pi * u(rng), 0.4 + 0.6 * u(rng));
    const auto hit = loc.locate(y);
    REQUIRE(hit.triangle >= 0);
    CHECK(hit.bary.minCoeff() > -1e-12);
    Vec2 back = Vec2::Zero();
    for (int i = 0; i < 3; ++i) back += hit.bary[i] * m.vertices[m.triangles[hit.triangle][i]];
    CHECK((back - y).norm() < 1e-12);
  }
}
