#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace hcs {

/// One (input feature, ground truth) pair for a given finer level. Stored as
/// float32, matching the on-disk record layout.
struct TrainingSample {
  Eigen::Matrix<float, 9, 1> input;
  Eigen::Matrix<float, 9, 1> target;
};

struct Dataset {
  uint32_t level = 0;  // the finer level these targets belong to
  std::vector<TrainingSample> samples;
  std::string provenance;  // scene/config identifiers and seed; not serialized

  uint64_t size() const { return samples.size(); }
};

/// Dataset file (little-endian): magic "HCSDS1", u32 level index,
/// u64 sample count, then per sample 18 float32 (9 input, 9 target).
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace hcs
