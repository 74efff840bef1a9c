#include "core/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "core/obj_io.hpp"
#include "core/rng.hpp"

namespace hcs {

namespace {

void apply_velocity_jitter(SolverState& state, const TriMesh& mesh,
                           double amplitude, uint64_t seed, uint64_t stream) {
  if (amplitude == 0.0) return;
  std::mt19937_64 gen = seeded_rng(seed, stream);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    Vec3 noise(uniform(gen, -1.0, 1.0), uniform(gen, -1.0, 1.0),
               uniform(gen, -1.0, 1.0));
    if (!mesh.is_pinned(v)) {
      state.velocities[static_cast<size_t>(v)] += amplitude * noise;
    }
  }
}

}  // namespace

Simulation::Simulation(const SimConfig& config, Mode mode, int level)
    : config_(config), mode_(mode) {
  config_.validate();
  sim_level_ = mode == Mode::Hybrid ? 0 : level;
  if (sim_level_ < 0 || sim_level_ > config_.levels) {
    throw Error(ErrorCode::InvalidArgument, "simulated level out of range");
  }

  TriMesh base = build_base_mesh(config_);
  hierarchy_ = build_hierarchy(base, config_.levels);

  const TriMesh& sim_mesh = hierarchy_.level(sim_level_);
  constraint_template_ = build_constraints(sim_mesh, config_.spring_stiffness,
                                           config_.bend_stiffness);
  state_ = make_state(sim_mesh, config_.total_mass);
  apply_velocity_jitter(state_, sim_mesh, config_.velocity_jitter, config_.seed,
                        static_cast<uint64_t>(sim_level_));

  SolveMethod method = config_.method == "cg" ? SolveMethod::Cg : SolveMethod::Admm;
  stepper_ = std::make_unique<CoarseStepper>(sim_mesh, constraint_template_,
                                             state_.masses, config_.solver,
                                             config_.collisions, method);

  level_positions_.resize(hierarchy_.levels.size());
  for (size_t i = 0; i < hierarchy_.levels.size(); ++i) {
    level_positions_[i] = hierarchy_.levels[i].vertices;  // rest pose
  }
  level_positions_[static_cast<size_t>(sim_level_)] = state_.positions;

  if (mode_ == Mode::Hybrid) {
    if (static_cast<int>(config_.model_paths.size()) != config_.levels) {
      throw Error(ErrorCode::InvalidArgument,
                  "hybrid mode needs one model per finer level (" +
                      std::to_string(config_.levels) + " expected, " +
                      std::to_string(config_.model_paths.size()) + " given)");
    }
    for (int i = 0; i < config_.levels; ++i) {
      MlpModel m = load_model(config_.model_paths[static_cast<size_t>(i)]);
      if (static_cast<int>(m.level_index) != i + 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "model '" + config_.model_paths[static_cast<size_t>(i)] +
                        "' targets level " + std::to_string(m.level_index) +
                        " but slot " + std::to_string(i + 1) + " was expected");
      }
      models_.push_back(std::move(m));
    }
  }
}

const std::vector<Vec3>& Simulation::positions(int level) const {
  return level_positions_.at(static_cast<size_t>(level));
}

void Simulation::step() {
  try {
    last_info_ = stepper_->step(state_);
    level_positions_[static_cast<size_t>(sim_level_)] = state_.positions;
    if (mode_ == Mode::Hybrid) {
      for (int i = 1; i <= config_.levels; ++i) {
        infer_level(models_[static_cast<size_t>(i - 1)], hierarchy_, i,
                    level_positions_[static_cast<size_t>(i - 1)],
                    level_positions_[static_cast<size_t>(i)],
                    config_.solver.threads);
        if (config_.fine_collision_pass && !config_.collisions.empty()) {
          std::vector<Vec3> no_velocities;
          resolve_collisions(level_positions_[static_cast<size_t>(i)],
                             no_velocities, config_.collisions);
        }
      }
    }
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " (frame " +
                              std::to_string(frame_ + 1) + ")");
  }
  ++frame_;
}

void Simulation::export_frame(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  auto write_level = [&](int level) {
    const TriMesh& mesh = hierarchy_.level(level);
    write_obj(dir + "/" + frame_obj_name(frame_, level),
              level_positions_[static_cast<size_t>(level)], mesh.triangles);
  };
  if (mode_ == Mode::Hybrid) {
    for (int i = 0; i <= config_.levels; ++i) write_level(i);
  } else {
    write_level(sim_level_);
  }
}

double RunStats::mean_ms() const {
  if (frame_ms.empty()) return 0.0;
  return std::accumulate(frame_ms.begin(), frame_ms.end(), 0.0) /
         static_cast<double>(frame_ms.size());
}

RunStats run_simulation(Simulation& sim, int frames, const std::string& out_dir) {
  RunStats stats;
  stats.frame_ms.reserve(static_cast<size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    auto t0 = std::chrono::steady_clock::now();
    sim.step();
    auto t1 = std::chrono::steady_clock::now();
    stats.frame_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (!out_dir.empty()) sim.export_frame(out_dir);
  }
  return stats;
}

Dataset generate_dataset(const std::vector<SimConfig>& scenes, int target_level,
                         int frames_per_scene, uint64_t seed) {
  if (scenes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "dataset needs at least one scene");
  }
  if (target_level < 1) {
    throw Error(ErrorCode::InvalidArgument, "target level must be >= 1");
  }
  if (frames_per_scene < 1) {
    throw Error(ErrorCode::InvalidArgument, "frames per scene must be >= 1");
  }

  Dataset dataset;
  dataset.level = static_cast<uint32_t>(target_level);
  dataset.provenance = "seed=" + std::to_string(seed);

  for (size_t scene_idx = 0; scene_idx < scenes.size(); ++scene_idx) {
    SimConfig cfg = scenes[scene_idx];
    if (cfg.levels < target_level) {
      throw Error(ErrorCode::InvalidArgument,
                  "scene " + std::to_string(scene_idx) + " ('" + cfg.scene +
                      "') has fewer levels than the dataset target");
    }
    cfg.method = "admm";
    cfg.seed = seed ^ (scene_idx * 0x9E3779B97F4A7C15ULL);
    dataset.provenance += ";scene=" + cfg.scene;

    Simulation sim(cfg, Simulation::Mode::Conventional, cfg.levels);
    const TriMesh& coarse = sim.hierarchy().level(target_level - 1);
    const TriMesh& fine = sim.hierarchy().level(target_level);

    for (int f = 0; f < frames_per_scene; ++f) {
      try {
        sim.step();
      } catch (const Error& e) {
        throw Error(e.code(), "dataset source simulation diverged in scene " +
                                  std::to_string(scene_idx) + " ('" + cfg.scene +
                                  "'): " + e.what());
      }
      // The fine run carries every coarser level's vertices as an index
      // prefix, so one position array serves both Eq. 4 and Eq. 5.
      const std::vector<Vec3>& frame_positions = sim.positions(cfg.levels);

      for (size_t t = 0; t < coarse.triangles.size(); ++t) {
        TrainingSample sample;
        Vec9 delta = extract_features(coarse.triangles[t], frame_positions,
                                      coarse.vertices);
        sample.input = delta.cast<float>();
        Vec9 target;
        const Tri& center =
            fine.triangles[sim.hierarchy()
                               .child_triangles[static_cast<size_t>(target_level - 1)][t][3]];
        for (int slot = 0; slot < 3; ++slot) {
          int m = center[slot];
          target.segment<3>(3 * slot) =
              frame_positions[static_cast<size_t>(m)] -
              fine.vertices[static_cast<size_t>(m)];
        }
        sample.target = target.cast<float>();
        dataset.samples.push_back(sample);
      }
    }
  }
  return dataset;
}

namespace {

BenchRow summarize(const std::string& method, int masses,
                   const std::vector<double>& ms) {
  BenchRow row;
  row.method = method;
  row.masses = masses;
  double mean = std::accumulate(ms.begin(), ms.end(), 0.0) /
                static_cast<double>(ms.size());
  double var = 0.0;
  for (double v : ms) var += (v - mean) * (v - mean);
  var /= static_cast<double>(ms.size());
  row.mean_ms = mean;
  row.std_ms = std::sqrt(var);
  return row;
}

BenchRow time_run(const std::string& label, SimConfig cfg, Simulation::Mode mode,
                  int level, int frames, int warmup) {
  Simulation sim(cfg, mode, level);
  for (int f = 0; f < warmup; ++f) sim.step();
  std::vector<double> ms;
  ms.reserve(static_cast<size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    auto t0 = std::chrono::steady_clock::now();
    sim.step();
    auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  int masses = sim.hierarchy().level(cfg.levels).vertex_count();
  return summarize(label, masses, ms);
}

}  // namespace

std::vector<BenchRow> bench(const SimConfig& config, int frames, int warmup) {
  if (frames < 1 || warmup < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad bench frame counts");
  }
  std::vector<BenchRow> rows;
  auto run_all = [&](const SimConfig& cfg, const std::string& suffix) {
    SimConfig cg = cfg;
    cg.method = "cg";
    rows.push_back(time_run("cg" + suffix, cg, Simulation::Mode::Conventional,
                            cfg.levels, frames, warmup));
    SimConfig admm = cfg;
    admm.method = "admm";
    rows.push_back(time_run("admm" + suffix, admm, Simulation::Mode::Conventional,
                            cfg.levels, frames, warmup));
    if (!cfg.model_paths.empty() || cfg.levels == 0) {
      SimConfig hybrid = cfg;
      hybrid.method = "hybrid";
      rows.push_back(time_run("hybrid" + suffix, hybrid, Simulation::Mode::Hybrid,
                              0, frames, warmup));
    }
  };
  run_all(config, "");
  if (!config.collisions.empty()) {
    SimConfig bare = config;
    bare.collisions.clear();
    bare.fine_collision_pass = false;
    run_all(bare, "_nocollide");
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  if (std::fprintf(f.get(), "method,masses,mean_ms,std_ms\n") < 0) {
    throw Error(ErrorCode::Io, "write failed for '" + path + "'");
  }
  for (const BenchRow& r : rows) {
    if (std::fprintf(f.get(), "%s,%d,%.6f,%.6f\n", r.method.c_str(), r.masses,
                     r.mean_ms, r.std_ms) < 0) {
      throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
  }
}

}  // namespace hcs
