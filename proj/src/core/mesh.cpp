#include "core/mesh.hpp"

#include <algorithm>
#include <unordered_map>

namespace hcs {

namespace {

inline uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

std::unordered_map<uint64_t, int> edge_index_map(const std::vector<Edge>& edges) {
  std::unordered_map<uint64_t, int> map;
  map.reserve(edges.size() * 2);
  for (size_t e = 0; e < edges.size(); ++e) {
    map.emplace(edge_key(edges[e][0], edges[e][1]), static_cast<int>(e));
  }
  return map;
}

}  // namespace

bool TriMesh::is_pinned(int v) const {
  return std::binary_search(pinned.begin(), pinned.end(), v);
}

std::vector<Edge> collect_edges(const std::vector<Tri>& triangles) {
  std::vector<Edge> edges;
  std::unordered_map<uint64_t, int> seen;
  seen.reserve(triangles.size() * 3);
  for (const Tri& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k];
      int b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      uint64_t key = edge_key(a, b);
      if (seen.emplace(key, static_cast<int>(edges.size())).second) {
        edges.push_back({a, b});
      }
    }
  }
  return edges;
}

TriMesh build_grid_mesh(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid cell counts must be >= 1");
  }
  if (width <= 0.0 || height <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }

  TriMesh mesh;
  const double dx = width / nx;
  const double dy = height / ny;
  mesh.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.emplace_back(i * dx, -j * dy, 0.0);
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.triangles.reserve(static_cast<size_t>(nx) * ny * 2);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Quad corners; the shared diagonal runs a-c.
      int a = vid(i, j + 1);      // lower-left (hanging toward -y)
      int b = vid(i + 1, j + 1);  // lower-right
      int c = vid(i + 1, j);      // upper-right
      int d = vid(i, j);          // upper-left
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  mesh.edges = collect_edges(mesh.triangles);
  return mesh;
}

SubdivisionResult subdivide(const TriMesh& mesh) {
  SubdivisionResult out;
  const int nv = mesh.vertex_count();

  out.mesh.vertices = mesh.vertices;
  out.mesh.vertices.reserve(mesh.vertices.size() + mesh.edges.size());
  out.edge_midpoint.resize(mesh.edges.size());
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& edge = mesh.edges[e];
    out.edge_midpoint[e] = nv + static_cast<int>(e);
    out.mesh.vertices.push_back(
        (mesh.vertices[edge[0]] + mesh.vertices[edge[1]]) / 2.0);
  }

  auto eidx = edge_index_map(mesh.edges);
  auto midpoint = [&](int a, int b) {
    return out.edge_midpoint[eidx.at(edge_key(a, b))];
  };

  out.mesh.triangles.reserve(mesh.triangles.size() * 4);
  out.children.resize(mesh.triangles.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto [p, q, r] = mesh.triangles[t];
    int mpq = midpoint(p, q);
    int mqr = midpoint(q, r);
    int mrp = midpoint(r, p);
    int base = static_cast<int>(out.mesh.triangles.size());
    out.mesh.triangles.push_back({p, mpq, mrp});
    out.mesh.triangles.push_back({q, mqr, mpq});
    out.mesh.triangles.push_back({r, mrp, mqr});
    out.mesh.triangles.push_back({mpq, mqr, mrp});
    out.children[t] = {base, base + 1, base + 2, base + 3};
  }
  out.mesh.edges = collect_edges(out.mesh.triangles);
  out.mesh.pinned = mesh.pinned;
  return out;
}

}  // namespace hcs
