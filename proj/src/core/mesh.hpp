#pragma once

#include <vector>

#include "core/types.hpp"

namespace hcs {

/// Triangle mesh with rest positions. Edges are deduplicated and kept in
/// first-appearance order over the triangle list, so edge indices are a
/// deterministic function of the topology.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::vector<Edge> edges;
  std::vector<int> pinned;  // sorted, unique vertex indices

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool is_pinned(int v) const;
};

/// Deduplicated edges of a triangle list in first-appearance order,
/// each stored as (min, max).
std::vector<Edge> collect_edges(const std::vector<Tri>& triangles);

/// Regular nx-by-ny lattice of quads in the x/y plane, row j=0 at y=0 and the
/// sheet hanging toward -y. Every quad is split along the same diagonal
/// (lower-left to upper-right). Vertex (i, j) has index j*(nx+1)+i.
TriMesh build_grid_mesh(int nx, int ny, double width, double height);

struct SubdivisionResult {
  TriMesh mesh;
  std::vector<int> edge_midpoint;             // parent edge -> child vertex
  std::vector<std::array<int, 4>> children;   // parent triangle -> 4 children
};

/// One level of midpoint subdivision: the child vertex list is the parent
/// vertices followed by one midpoint per parent edge (in parent edge order);
/// parent triangle (p,q,r) with edge midpoints (mpq,mqr,mrp) yields children
/// (p,mpq,mrp), (q,mqr,mpq), (r,mrp,mqr), (mpq,mqr,mrp). Pins carry over.
SubdivisionResult subdivide(const TriMesh& mesh);

}  // namespace hcs
