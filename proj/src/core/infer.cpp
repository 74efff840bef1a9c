#include "core/infer.hpp"

#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hcs {

Vec9 extract_features(const Tri& tri, const std::vector<Vec3>& positions,
                      const std::vector<Vec3>& rest_positions) {
  Vec9 delta;
  for (int k = 0; k < 3; ++k) {
    int v = tri[k];
    delta.segment<3>(3 * k) =
        positions[static_cast<size_t>(v)] - rest_positions[static_cast<size_t>(v)];
  }
  return delta;
}

void apply_outputs(const ClothHierarchy& hierarchy, int fine_level,
                   const std::vector<Vec9>& outputs,
                   const std::vector<Vec3>& coarse_positions,
                   std::vector<Vec3>& fine_positions) {
  if (fine_level < 1 || fine_level > hierarchy.finest_level()) {
    throw Error(ErrorCode::InvalidArgument, "fine level out of range");
  }
  const TriMesh& coarse = hierarchy.level(fine_level - 1);
  const TriMesh& fine = hierarchy.level(fine_level);
  const auto& sources = hierarchy.midpoint_sources[static_cast<size_t>(fine_level - 1)];
  if (outputs.size() != coarse.triangles.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "one output vector per parent triangle required");
  }

  const int coarse_verts = coarse.vertex_count();
  fine_positions.resize(fine.vertices.size());
  for (int v = 0; v < coarse_verts; ++v) {
    fine_positions[static_cast<size_t>(v)] = coarse_positions[static_cast<size_t>(v)];
  }
  for (size_t m = 0; m < sources.size(); ++m) {
    const auto& src = sources[m];
    Vec3 displacement =
        outputs[static_cast<size_t>(src.first.triangle)].segment<3>(3 * src.first.slot);
    if (src.count == 2) {
      Vec3 second =
          outputs[static_cast<size_t>(src.second.triangle)].segment<3>(3 * src.second.slot);
      displacement = (displacement + second) / 2.0;
    }
    size_t v = static_cast<size_t>(coarse_verts) + m;
    fine_positions[v] = fine.vertices[v] + displacement;
  }
}

void infer_level(const MlpModel& model, const ClothHierarchy& hierarchy,
                 int fine_level, const std::vector<Vec3>& coarse_positions,
                 std::vector<Vec3>& fine_positions, int threads) {
  if (fine_level < 1 || fine_level > hierarchy.finest_level()) {
    throw Error(ErrorCode::InvalidArgument, "fine level out of range");
  }
  if (static_cast<int>(model.level_index) != fine_level) {
    throw Error(ErrorCode::InvalidArgument,
                "model targets level " + std::to_string(model.level_index) +
                    ", not level " + std::to_string(fine_level));
  }
  if (model.input_dim() != 9 || model.output_dim() != 9) {
    throw Error(ErrorCode::InvalidArgument, "inference model must be 9 -> 9");
  }

  const TriMesh& coarse = hierarchy.level(fine_level - 1);
  const int ntri = coarse.triangle_count();
  std::vector<Vec9> outputs(static_cast<size_t>(ntri));

  bool finite = true;
#ifndef _OPENMP
  (void)threads;
#endif
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : 1) \
    reduction(&& : finite)
#endif
  for (int t = 0; t < ntri; ++t) {
    Vec9 delta = extract_features(coarse.triangles[static_cast<size_t>(t)],
                                  coarse_positions, coarse.vertices);
    Eigen::VectorXd o = forward(model, delta);
    outputs[static_cast<size_t>(t)] = o;
    finite = finite && o.allFinite();
  }
  if (!finite) {
    throw Error(ErrorCode::Inference, "network produced non-finite output at level " +
                                          std::to_string(fine_level));
  }

  apply_outputs(hierarchy, fine_level, outputs, coarse_positions, fine_positions);
}

}  // namespace hcs
