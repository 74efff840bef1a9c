#pragma once

#include <vector>

#include "core/hierarchy.hpp"
#include "core/mlp.hpp"

namespace hcs {

/// Input feature of one coarse triangle: the corner displacements from rest,
/// concatenated in the triangle's stored vertex order.
Vec9 extract_features(const Tri& tri, const std::vector<Vec3>& positions,
                      const std::vector<Vec3>& rest_positions);

/// Places one fine level from per-parent-triangle output vectors. Inserted
/// midpoints get rest position + the mean of their 1 or 2 contributions
/// (contribution order is fixed: ascending parent triangle); vertices
/// inherited from the coarse level copy the given coarse positions.
/// `fine_level` is the level the outputs target (>= 1).
void apply_outputs(const ClothHierarchy& hierarchy, int fine_level,
                   const std::vector<Vec9>& outputs,
                   const std::vector<Vec3>& coarse_positions,
                   std::vector<Vec3>& fine_positions);

/// extract_features -> forward -> apply_outputs over every parent triangle.
/// Per-triangle inference writes to disjoint slots of an output buffer, so the
/// result is bitwise identical for any worker count.
void infer_level(const MlpModel& model, const ClothHierarchy& hierarchy,
                 int fine_level, const std::vector<Vec3>& coarse_positions,
                 std::vector<Vec3>& fine_positions, int threads = 1);

}  // namespace hcs
