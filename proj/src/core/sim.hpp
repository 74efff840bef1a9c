#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/hierarchy.hpp"
#include "core/infer.hpp"
#include "core/scene.hpp"
#include "core/solver.hpp"

namespace hcs {

/// A runnable scene. Conventional mode steps one hierarchy level with real
/// physics; hybrid mode steps level 0 and infers levels 1..N per frame
/// (Algorithm-1 style pipeline). Levels above the simulated one hold their
/// rest pose until touched.
class Simulation {
 public:
  enum class Mode { Conventional, Hybrid };

  /// `level` picks the simulated level in conventional mode (ignored for
  /// hybrid, which always steps level 0). Models for hybrid come from
  /// config.model_paths; an empty list with levels == 0 is allowed.
  Simulation(const SimConfig& config, Mode mode, int level = 0);

  /// Advances one frame. Throws with the failing frame index on divergence
  /// or inference failure.
  void step();

  int frame() const { return frame_; }
  Mode mode() const { return mode_; }
  int simulated_level() const { return sim_level_; }
  const ClothHierarchy& hierarchy() const { return hierarchy_; }
  const SimConfig& config() const { return config_; }
  const std::vector<Vec3>& positions(int level) const;
  StepInfo last_step_info() const { return last_info_; }

  /// Writes frame_%05d_l%d.obj for the current frame into `dir`: every level
  /// for hybrid runs, the simulated level otherwise.
  void export_frame(const std::string& dir) const;

 private:
  SimConfig config_;
  Mode mode_;
  int sim_level_ = 0;
  ClothHierarchy hierarchy_;
  std::vector<Constraint> constraint_template_;
  std::unique_ptr<CoarseStepper> stepper_;
  SolverState state_;
  std::vector<MlpModel> models_;  // hybrid: models_[i] targets level i+1
  std::vector<std::vector<Vec3>> level_positions_;
  int frame_ = 0;
  StepInfo last_info_;
};

/// Steps a simulation `frames` times, exporting each frame when `out_dir` is
/// set. Per-frame wall time goes to the returned log (milliseconds).
struct RunStats {
  std::vector<double> frame_ms;
  double mean_ms() const;
};
RunStats run_simulation(Simulation& sim, int frames, const std::string& out_dir);

/// Ground-truth sampling: runs each scene's conventional ADMM simulation at
/// its finest level and emits one (feature, target) pair per level-
/// (target_level - 1) triangle per frame, inputs restricted to the coarser
/// vertex subset of the same frame. Deterministic in `seed`.
Dataset generate_dataset(const std::vector<SimConfig>& scenes, int target_level,
                         int frames_per_scene, uint64_t seed);

struct BenchRow {
  std::string method;
  int masses = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

/// Table-2-style comparison on one config: conventional CG and ADMM at the
/// finest level, plus the hybrid pipeline, each timed over `frames` frames
/// after `warmup` untimed ones. Timing covers stepping/inference only (no
/// export). Configs with collision primitives get extra *_nocollide rows.
std::vector<BenchRow> bench(const SimConfig& config, int frames, int warmup);

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace hcs
