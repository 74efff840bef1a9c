#include "core/hierarchy.hpp"

#include <string>
#include <unordered_map>

namespace hcs {

namespace {

// Midpoint ids of triangle t's edges at the finer level, in output-slot order
// (m_pq, m_qr, m_rp). Recovered from the child triangles: child 3 is the
// center triangle (mpq, mqr, mrp).
std::array<int, 3> triangle_midpoints(const std::array<int, 4>& children,
                                      const TriMesh& fine) {
  const Tri& center = fine.triangles[children[3]];
  return {center[0], center[1], center[2]};
}

}  // namespace

ClothHierarchy build_hierarchy(const TriMesh& base, int finer_levels,
                               int max_levels) {
  if (finer_levels < 0) {
    throw Error(ErrorCode::InvalidArgument, "finer level count must be >= 0");
  }
  if (finer_levels > max_levels) {
    throw Error(ErrorCode::InvalidArgument,
                "finer level count " + std::to_string(finer_levels) +
                    " exceeds the configured maximum of " +
                    std::to_string(max_levels));
  }

  ClothHierarchy h;
  h.levels.push_back(base);
  for (int i = 0; i < finer_levels; ++i) {
    SubdivisionResult sub = subdivide(h.levels.back());
    const TriMesh& coarse = h.levels[static_cast<size_t>(i)];
    const int coarse_verts = coarse.vertex_count();

    std::vector<ClothHierarchy::MidpointSources> sources(
        sub.mesh.vertices.size() - static_cast<size_t>(coarse_verts));
    for (size_t t = 0; t < sub.children.size(); ++t) {
      auto mids = triangle_midpoints(sub.children[t], sub.mesh);
      for (int slot = 0; slot < 3; ++slot) {
        auto& src = sources[static_cast<size_t>(mids[slot] - coarse_verts)];
        ClothHierarchy::Contribution c{static_cast<int>(t), slot};
        if (src.count == 0) {
          src.first = c;
        } else if (src.count == 1) {
          src.second = c;  // triangles visited in ascending order
        } else {
          throw Error(ErrorCode::Topology,
                      "midpoint mass shared by more than two triangles");
        }
        ++src.count;
      }
    }
    for (size_t m = 0; m < sources.size(); ++m) {
      if (sources[m].count == 0) {
        throw Error(ErrorCode::Topology,
                    "midpoint mass " + std::to_string(coarse_verts + m) +
                        " has no contributing parent triangle");
      }
    }

    h.edge_midpoint.push_back(std::move(sub.edge_midpoint));
    h.child_triangles.push_back(std::move(sub.children));
    h.midpoint_sources.push_back(std::move(sources));
    h.levels.push_back(std::move(sub.mesh));
  }
  return h;
}

}  // namespace hcs
