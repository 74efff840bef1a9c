#include "hcs/hcs.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/hierarchy.hpp"
#include "core/mlp.hpp"
#include "core/obj_io.hpp"
#include "core/scene.hpp"
#include "core/sim.hpp"
#include "core/trainer.hpp"

namespace {

thread_local std::string g_last_error;

hcs_status to_status(hcs::ErrorCode code) {
  using hcs::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return HCS_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return HCS_ERR_IO;
    case ErrorCode::Format: return HCS_ERR_FORMAT;
    case ErrorCode::Truncated: return HCS_ERR_TRUNCATED;
    case ErrorCode::Diverged: return HCS_ERR_DIVERGED;
    case ErrorCode::Inference: return HCS_ERR_INFERENCE;
    case ErrorCode::Topology: return HCS_ERR_TOPOLOGY;
  }
  return HCS_ERR_UNKNOWN;
}

template <typename Fn>
hcs_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HCS_OK;
  } catch (const hcs::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HCS_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return HCS_ERR_UNKNOWN;
  }
}

hcs_status invalid(const char* message) {
  g_last_error = message;
  return HCS_ERR_INVALID_ARGUMENT;
}

std::vector<int> parse_epoch_list(const char* csv) {
  std::vector<int> epochs;
  if (!csv) return epochs;
  std::string s(csv);
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    std::string tok = s.substr(start, comma - start);
    if (!tok.empty()) {
      epochs.push_back(std::stoi(tok));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return epochs;
}

hcs::TrainConfig to_train_config(const hcs_train_options* options) {
  hcs::TrainConfig cfg;
  if (!options) return cfg;
  cfg.epochs = options->epochs;
  cfg.batch_size = options->batch_size;
  cfg.learning_rate = options->learning_rate;
  cfg.beta1 = options->beta1;
  cfg.beta2 = options->beta2;
  cfg.epsilon = options->epsilon;
  cfg.seed = options->seed;
  if (options->hidden_layers < 1 || options->hidden_width < 1) {
    throw hcs::Error(hcs::ErrorCode::InvalidArgument,
                     "hidden layer count and width must be >= 1");
  }
  cfg.hidden.assign(static_cast<size_t>(options->hidden_layers),
                    options->hidden_width);
  cfg.checkpoint_epochs = parse_epoch_list(options->checkpoint_epochs);
  if (options->checkpoint_dir) cfg.checkpoint_dir = options->checkpoint_dir;
  cfg.record_every = options->record_every;
  cfg.workers = options->workers;
  return cfg;
}

}  // namespace

struct hcs_hierarchy {
  hcs::ClothHierarchy hierarchy;
};

struct hcs_config {
  hcs::SimConfig config;
};

struct hcs_sim {
  explicit hcs_sim(hcs::Simulation s) : sim(std::move(s)) {}
  hcs::Simulation sim;
};

struct hcs_model {
  hcs::MlpModel model;
};

extern "C" {

const char* hcs_status_string(hcs_status status) {
  switch (status) {
    case HCS_OK: return "ok";
    case HCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HCS_ERR_IO: return "i/o error";
    case HCS_ERR_FORMAT: return "format error";
    case HCS_ERR_TRUNCATED: return "truncated file";
    case HCS_ERR_DIVERGED: return "simulation diverged";
    case HCS_ERR_INFERENCE: return "inference failure";
    case HCS_ERR_TOPOLOGY: return "topology error";
    case HCS_ERR_UNKNOWN: break;
  }
  return "unknown error";
}

const char* hcs_last_error(void) { return g_last_error.c_str(); }

const char* hcs_version(void) { return "0.1.0"; }

/* Hierarchy ---------------------------------------------------------- */

hcs_status hcs_hierarchy_create_grid(int nx, int ny, double width, double height,
                                     int finer_levels, hcs_hierarchy** out) {
  if (!out) return invalid("null output handle");
  *out = nullptr;
  return guarded([&] {
    hcs::TriMesh base = hcs::build_grid_mesh(nx, ny, width, height);
    auto* h = new hcs_hierarchy{hcs::build_hierarchy(base, finer_levels)};
    *out = h;
  });
}

int hcs_hierarchy_levels(const hcs_hierarchy* h) {
  return h ? static_cast<int>(h->hierarchy.levels.size()) : 0;
}

hcs_status hcs_hierarchy_counts(const hcs_hierarchy* h, int level,
                                uint64_t* vertices, uint64_t* edges,
                                uint64_t* triangles) {
  if (!h) return invalid("null hierarchy");
  if (level < 0 || level > h->hierarchy.finest_level()) {
    return invalid("level out of range");
  }
  const hcs::TriMesh& mesh = h->hierarchy.level(level);
  if (vertices) *vertices = static_cast<uint64_t>(mesh.vertex_count());
  if (edges) *edges = static_cast<uint64_t>(mesh.edge_count());
  if (triangles) *triangles = static_cast<uint64_t>(mesh.triangle_count());
  return HCS_OK;
}

hcs_status hcs_hierarchy_export_obj(const hcs_hierarchy* h, int level,
                                    const char* path) {
  if (!h || !path) return invalid("null hierarchy or path");
  if (level < 0 || level > h->hierarchy.finest_level()) {
    return invalid("level out of range");
  }
  return guarded([&] {
    const hcs::TriMesh& mesh = h->hierarchy.level(level);
    hcs::write_obj(path, mesh.vertices, mesh.triangles);
  });
}

void hcs_hierarchy_destroy(hcs_hierarchy* h) { delete h; }

/* Config ------------------------------------------------------------- */

hcs_status hcs_config_create(const char* scene, hcs_config** out) {
  if (!out) return invalid("null output handle");
  *out = nullptr;
  return guarded([&] {
    *out = new hcs_config{hcs::scene_preset(scene ? scene : "flag")};
  });
}

hcs_status hcs_config_load(const char* path, hcs_config** out) {
  if (!out || !path) return invalid("null path or output handle");
  *out = nullptr;
  return guarded([&] { *out = new hcs_config{hcs::load_config(path)}; });
}

hcs_status hcs_config_set(hcs_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("null config, key or value");
  return guarded([&] { hcs::apply_override(config->config, key, value); });
}

int hcs_config_frames(const hcs_config* config) {
  return config ? config->config.frames : -1;
}

void hcs_config_destroy(hcs_config* config) { delete config; }

/* Simulation --------------------------------------------------------- */

hcs_status hcs_sim_create(const hcs_config* config, const char* method, int level,
                          hcs_sim** out) {
  if (!config || !out) return invalid("null config or output handle");
  *out = nullptr;
  return guarded([&] {
    hcs::SimConfig cfg = config->config;
    if (method && *method) cfg.method = method;
    auto mode = cfg.method == "hybrid" ? hcs::Simulation::Mode::Hybrid
                                       : hcs::Simulation::Mode::Conventional;
    *out = new hcs_sim(hcs::Simulation(cfg, mode, level));
  });
}

hcs_status hcs_sim_step(hcs_sim* sim) {
  if (!sim) return invalid("null simulation");
  return guarded([&] { sim->sim.step(); });
}

int hcs_sim_frame(const hcs_sim* sim) { return sim ? sim->sim.frame() : -1; }

hcs_status hcs_sim_positions(const hcs_sim* sim, int level, const double** xyz,
                             uint64_t* count) {
  if (!sim || !xyz || !count) return invalid("null simulation or output");
  return guarded([&] {
    const auto& p = sim->sim.positions(level);
    *xyz = reinterpret_cast<const double*>(p.data());
    *count = p.size();
  });
}

hcs_status hcs_sim_export_frame(hcs_sim* sim, const char* dir) {
  if (!sim || !dir) return invalid("null simulation or directory");
  return guarded([&] { sim->sim.export_frame(dir); });
}

void hcs_sim_destroy(hcs_sim* sim) { delete sim; }

/* Models ------------------------------------------------------------- */

hcs_status hcs_model_create(uint32_t level, int hidden_layers, int hidden_width,
                            uint64_t seed, hcs_model** out) {
  if (!out) return invalid("null output handle");
  *out = nullptr;
  return guarded([&] {
    if (hidden_layers < 1 || hidden_width < 1) {
      throw hcs::Error(hcs::ErrorCode::InvalidArgument,
                       "hidden layer count and width must be >= 1");
    }
    std::vector<int> hidden(static_cast<size_t>(hidden_layers), hidden_width);
    hcs::MlpModel m = hcs::make_model(level, hidden);
    hcs::init_model(m, seed);
    *out = new hcs_model{std::move(m)};
  });
}

hcs_status hcs_model_create_zero(uint32_t level, int hidden_layers,
                                 int hidden_width, hcs_model** out) {
  if (!out) return invalid("null output handle");
  *out = nullptr;
  return guarded([&] {
    if (hidden_layers < 1 || hidden_width < 1) {
      throw hcs::Error(hcs::ErrorCode::InvalidArgument,
                       "hidden layer count and width must be >= 1");
    }
    std::vector<int> hidden(static_cast<size_t>(hidden_layers), hidden_width);
    *out = new hcs_model{hcs::make_model(level, hidden)};
  });
}

hcs_status hcs_model_load(const char* path, hcs_model** out) {
  if (!out || !path) return invalid("null path or output handle");
  *out = nullptr;
  return guarded([&] { *out = new hcs_model{hcs::load_model(path)}; });
}

hcs_status hcs_model_save(const hcs_model* model, const char* path) {
  if (!model || !path) return invalid("null model or path");
  return guarded([&] { hcs::save_model(model->model, path); });
}

int hcs_model_level(const hcs_model* model) {
  return model ? static_cast<int>(model->model.level_index) : -1;
}

void hcs_model_destroy(hcs_model* model) { delete model; }

/* Dataset and training ------------------------------------------------ */

hcs_status hcs_dataset_generate(const hcs_config* const* configs, int config_count,
                                int target_level, int frames_per_scene,
                                uint64_t seed, const char* out_path) {
  if (!configs || config_count < 1 || !out_path) {
    return invalid("null configs or output path");
  }
  return guarded([&] {
    std::vector<hcs::SimConfig> scenes;
    scenes.reserve(static_cast<size_t>(config_count));
    for (int i = 0; i < config_count; ++i) {
      if (!configs[i]) {
        throw hcs::Error(hcs::ErrorCode::InvalidArgument, "null config in list");
      }
      scenes.push_back(configs[i]->config);
    }
    hcs::Dataset d = hcs::generate_dataset(scenes, target_level,
                                           frames_per_scene, seed);
    hcs::save_dataset(d, out_path);
  });
}

hcs_status hcs_dataset_info(const char* path, uint32_t* level, uint64_t* samples) {
  if (!path) return invalid("null path");
  return guarded([&] {
    hcs::Dataset d = hcs::load_dataset(path);
    if (level) *level = d.level;
    if (samples) *samples = d.size();
  });
}

void hcs_train_options_init(hcs_train_options* options) {
  if (!options) return;
  hcs::TrainConfig defaults;
  options->epochs = defaults.epochs;
  options->batch_size = defaults.batch_size;
  options->learning_rate = defaults.learning_rate;
  options->beta1 = defaults.beta1;
  options->beta2 = defaults.beta2;
  options->epsilon = defaults.epsilon;
  options->seed = defaults.seed;
  options->hidden_layers = 2;
  options->hidden_width = 32;
  options->checkpoint_epochs = nullptr;
  options->checkpoint_dir = nullptr;
  options->record_every = defaults.record_every;
  options->workers = defaults.workers;
}

hcs_status hcs_train(const char* dataset_path, const hcs_train_options* options,
                     const char* model_out, const char* loss_csv_out) {
  if (!dataset_path) return invalid("null dataset path");
  return guarded([&] {
    hcs::Dataset dataset = hcs::load_dataset(dataset_path);
    hcs::TrainConfig cfg = to_train_config(options);
    hcs::TrainResult result = hcs::train(dataset, cfg);
    if (model_out) hcs::save_model(result.model, model_out);
    if (loss_csv_out) hcs::write_loss_csv(result.loss_log, loss_csv_out);
  });
}

hcs_status hcs_sweep(const char* dataset_path, const hcs_train_options* options,
                     const char* out_dir) {
  if (!dataset_path || !out_dir) return invalid("null dataset path or out dir");
  return guarded([&] {
    hcs::Dataset dataset = hcs::load_dataset(dataset_path);
    hcs::TrainConfig cfg = to_train_config(options);
    auto entries = hcs::sweep_architectures(dataset, cfg, {2, 3, 4, 5},
                                            {16, 32, 64, 128});
    hcs::write_sweep_reports(entries, out_dir);
  });
}

/* Benchmark ----------------------------------------------------------- */

hcs_status hcs_bench(const hcs_config* config, int frames, int warmup,
                     const char* out_path) {
  if (!config || !out_path) return invalid("null config or output path");
  return guarded([&] {
    auto rows = hcs::bench(config->config, frames, warmup);
    hcs::write_bench_csv(rows, out_path);
  });
}

} /* extern "C" */
