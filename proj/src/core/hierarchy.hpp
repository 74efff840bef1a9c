#pragma once

#include <vector>

#include "core/mesh.hpp"

namespace hcs {

/// Multi-level cloth model. Level i+1 is the midpoint subdivision of level i;
/// level-i vertices keep their indices in every finer level, inserted
/// midpoints are appended. Vertex positions stored per level are the rest
/// positions x_hat. Immutable after construction.
struct ClothHierarchy {
  /// Where a midpoint mass takes its inference output from: parent triangle
  /// index at the coarser level and the output slot (0: m_pq, 1: m_qr,
  /// 2: m_rp) inside that triangle's 9-vector.
  struct Contribution {
    int triangle = -1;
    int slot = -1;
  };
  /// Per inserted midpoint: its 1 or 2 contributing parent triangles,
  /// ascending triangle index.
  struct MidpointSources {
    Contribution first;
    Contribution second;
    int count = 0;
  };

  std::vector<TriMesh> levels;
  std::vector<std::vector<int>> edge_midpoint;    // [i]: level-i edge -> level-(i+1) vertex
  std::vector<std::vector<std::array<int, 4>>> child_triangles;  // [i]: level-i tri -> children
  std::vector<std::vector<MidpointSources>> midpoint_sources;    // [i]: level-(i+1) midpoints

  int finest_level() const { return static_cast<int>(levels.size()) - 1; }
  const TriMesh& level(int i) const { return levels.at(static_cast<size_t>(i)); }
};

/// Builds base plus `finer_levels` subdivided levels. `max_levels` guards
/// against runaway memory.
ClothHierarchy build_hierarchy(const TriMesh& base, int finer_levels,
                               int max_levels = 8);

}  // namespace hcs
