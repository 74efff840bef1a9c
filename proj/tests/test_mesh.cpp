#include <doctest.h>

#include <set>
#include <utility>

#include "core/mesh.hpp"

using namespace hcs;

namespace {

// Independent edge oracle: set-based dedup, no ordering assumptions.
std::set<std::pair<int, int>> enumerate_edges(const std::vector<Tri>& tris) {
  std::set<std::pair<int, int>> edges;
  for (const Tri& t : tris) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return edges;
}

void check_edges_match_enumeration(const TriMesh& mesh) {
  auto oracle = enumerate_edges(mesh.triangles);
  REQUIRE(mesh.edges.size() == oracle.size());
  std::set<std::pair<int, int>> stored;
  for (const Edge& e : mesh.edges) {
    CHECK(e[0] < e[1]);
    stored.emplace(e[0], e[1]);
  }
  CHECK(stored == oracle);
}

}  // namespace

TEST_CASE("grid mesh: single quad") {
  TriMesh m = build_grid_mesh(1, 1, 1.0, 1.0);
  CHECK(m.vertex_count() == 4);
  CHECK(m.triangle_count() == 2);
  CHECK(m.edge_count() == 5);
  check_edges_match_enumeration(m);
}

TEST_CASE("grid mesh: 2x2") {
  TriMesh m = build_grid_mesh(2, 2, 1.0, 1.0);
  CHECK(m.vertex_count() == 9);
  CHECK(m.triangle_count() == 8);
  CHECK(m.edge_count() == 16);
  check_edges_match_enumeration(m);
}

TEST_CASE("grid mesh: 16x16 with anisotropic size") {
  TriMesh m = build_grid_mesh(16, 16, 2.0, 1.5);
  CHECK(m.vertex_count() == 289);   // (n+1)^2
  CHECK(m.triangle_count() == 512); // 2 n^2
  check_edges_match_enumeration(m);
  // lattice spacing honors the physical size
  CHECK(m.vertices[1].x() == doctest::Approx(2.0 / 16));
  CHECK(m.vertices[17].y() == doctest::Approx(-1.5 / 16));
}

TEST_CASE("grid mesh: Euler characteristic of a disk") {
  for (int n : {1, 2, 5, 8}) {
    TriMesh m = build_grid_mesh(n, n, 1.0, 1.0);
    CHECK(m.vertex_count() - m.edge_count() + m.triangle_count() == 1);
  }
}

TEST_CASE("grid mesh rejects bad input") {
  CHECK_THROWS_AS(build_grid_mesh(0, 1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(build_grid_mesh(1, -2, 1.0, 1.0), Error);
  CHECK_THROWS_AS(build_grid_mesh(1, 1, 0.0, 1.0), Error);
  CHECK_THROWS_AS(build_grid_mesh(1, 1, 1.0, -1.0), Error);
}

TEST_CASE("subdivide: single triangle") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.triangles = {{0, 1, 2}};
  m.edges = collect_edges(m.triangles);

  SubdivisionResult sub = subdivide(m);
  CHECK(sub.mesh.vertex_count() == 6);
  CHECK(sub.mesh.edge_count() == 9);
  CHECK(sub.mesh.triangle_count() == 4);
  check_edges_match_enumeration(sub.mesh);

  // child ordering contract: (p,mpq,mrp), (q,mqr,mpq), (r,mrp,mqr), center
  const auto& children = sub.children[0];
  const Tri& center = sub.mesh.triangles[children[3]];
  const Tri& first = sub.mesh.triangles[children[0]];
  CHECK(first[0] == 0);
  CHECK(first[1] == center[0]);  // mpq
  CHECK(first[2] == center[2]);  // mrp

  // midpoints are exact
  for (size_t e = 0; e < m.edges.size(); ++e) {
    Vec3 expect = (m.vertices[m.edges[e][0]] + m.vertices[m.edges[e][1]]) / 2.0;
    CHECK(sub.mesh.vertices[sub.edge_midpoint[e]] == expect);
  }
}

TEST_CASE("subdivide: 2x2 grid counts") {
  TriMesh m = build_grid_mesh(2, 2, 1.0, 1.0);
  SubdivisionResult sub = subdivide(m);
  CHECK(sub.mesh.vertex_count() == 25);  // V + E
  CHECK(sub.mesh.triangle_count() == 32);
  CHECK(sub.mesh.edge_count() == 2 * 16 + 3 * 8);
  check_edges_match_enumeration(sub.mesh);
}

TEST_CASE("subdivide twice from one triangle") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.triangles = {{0, 1, 2}};
  m.edges = collect_edges(m.triangles);
  TriMesh twice = subdivide(subdivide(m).mesh).mesh;
  CHECK(twice.vertex_count() == 15);
  CHECK(twice.triangle_count() == 16);
}

TEST_CASE("subdivision keeps coarse vertices as a prefix") {
  TriMesh m = build_grid_mesh(3, 2, 1.5, 1.0);
  SubdivisionResult sub = subdivide(m);
  REQUIRE(sub.mesh.vertex_count() == m.vertex_count() + m.edge_count());
  for (int v = 0; v < m.vertex_count(); ++v) {
    CHECK(sub.mesh.vertices[v] == m.vertices[v]);
  }
}
