// Command-line front end for the hcs shared library. Everything goes through
// the public C API in hcs/hcs.h.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcs/hcs.h"

namespace {

struct ConfigDeleter {
  void operator()(hcs_config* c) const { hcs_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<hcs_config, ConfigDeleter>;

int fail(hcs_status status, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what.c_str(), hcs_last_error(),
               hcs_status_string(status));
  return 1;
}

// Shared scene/config/override flags for the subcommands that take a scene.
struct SceneArgs {
  std::string config_file;
  std::string scene;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file");
    cmd->add_option("--scene", scene, "built-in scene: flag|hang|sphere|stretch");
    cmd->add_option("--set", overrides,
                    "dotted-key override, e.g. --set grid.nx=8");
  }

  int make(ConfigPtr& out) const {
    hcs_config* cfg = nullptr;
    hcs_status st;
    if (!config_file.empty()) {
      st = hcs_config_load(config_file.c_str(), &cfg);
      if (st != HCS_OK) return fail(st, "loading config " + config_file);
      if (!scene.empty()) {
        hcs_config_destroy(cfg);
        std::fprintf(stderr, "error: use either --config or --scene, not both\n");
        return 1;
      }
    } else {
      st = hcs_config_create(scene.empty() ? "flag" : scene.c_str(), &cfg);
      if (st != HCS_OK) return fail(st, "creating scene");
    }
    out.reset(cfg);
    for (const std::string& kv : overrides) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: override '%s' is not key=value\n", kv.c_str());
        return 1;
      }
      st = hcs_config_set(out.get(), kv.substr(0, eq).c_str(),
                          kv.substr(eq + 1).c_str());
      if (st != HCS_OK) return fail(st, "override " + kv);
    }
    return 0;
  }
};

int run_mesh(int nx, int ny, double width, double height, int levels,
             const std::string& out_dir) {
  hcs_hierarchy* h = nullptr;
  hcs_status st = hcs_hierarchy_create_grid(nx, ny, width, height, levels, &h);
  if (st != HCS_OK) return fail(st, "building hierarchy");
  std::unique_ptr<hcs_hierarchy, void (*)(hcs_hierarchy*)> guard(
      h, &hcs_hierarchy_destroy);

  std::printf("level  vertices  edges  triangles\n");
  for (int l = 0; l < hcs_hierarchy_levels(h); ++l) {
    uint64_t v = 0, e = 0, f = 0;
    hcs_hierarchy_counts(h, l, &v, &e, &f);
    std::printf("%5d  %8" PRIu64 "  %5" PRIu64 "  %9" PRIu64 "\n", l, v, e, f);
    if (!out_dir.empty()) {
      std::string path = out_dir + "/level_" + std::to_string(l) + ".obj";
      st = hcs_hierarchy_export_obj(h, l, path.c_str());
      if (st != HCS_OK) return fail(st, "writing " + path);
      std::printf("wrote %s\n", path.c_str());
    }
  }
  return 0;
}

int run_simulate(const SceneArgs& scene_args, const std::string& method,
                 int frames, const std::string& out_dir, int64_t seed,
                 int level, bool quiet) {
  ConfigPtr cfg;
  if (int rc = scene_args.make(cfg)) return rc;
  if (seed >= 0) {
    hcs_config_set(cfg.get(), "seed", std::to_string(seed).c_str());
  }
  if (frames < 0) frames = hcs_config_frames(cfg.get());

  hcs_sim* sim = nullptr;
  hcs_status st = hcs_sim_create(cfg.get(), method.empty() ? nullptr : method.c_str(),
                                 level, &sim);
  if (st != HCS_OK) return fail(st, "creating simulation");
  std::unique_ptr<hcs_sim, void (*)(hcs_sim*)> guard(sim, &hcs_sim_destroy);

  for (int f = 0; f < frames; ++f) {
    auto t0 = std::chrono::steady_clock::now();
    st = hcs_sim_step(sim);
    auto t1 = std::chrono::steady_clock::now();
    if (st != HCS_OK) return fail(st, "stepping frame " + std::to_string(f + 1));
    if (!out_dir.empty()) {
      st = hcs_sim_export_frame(sim, out_dir.c_str());
      if (st != HCS_OK) return fail(st, "exporting frame " + std::to_string(f + 1));
    }
    if (!quiet) {
      double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      std::fprintf(stderr, "frame %d: %.3f ms\n", hcs_sim_frame(sim), ms);
    }
  }
  return 0;
}

int run_sample(const std::vector<std::string>& scene_names,
               const std::vector<std::string>& config_files,
               const std::vector<std::string>& overrides, int level, int frames,
               uint64_t seed, const std::string& out_path) {
  std::vector<ConfigPtr> owned;
  for (const std::string& name : scene_names) {
    hcs_config* cfg = nullptr;
    hcs_status st = hcs_config_create(name.c_str(), &cfg);
    if (st != HCS_OK) return fail(st, "creating scene " + name);
    owned.emplace_back(cfg);
  }
  for (const std::string& file : config_files) {
    hcs_config* cfg = nullptr;
    hcs_status st = hcs_config_load(file.c_str(), &cfg);
    if (st != HCS_OK) return fail(st, "loading config " + file);
    owned.emplace_back(cfg);
  }
  if (owned.empty()) {
    hcs_config* cfg = nullptr;
    hcs_status st = hcs_config_create("flag", &cfg);
    if (st != HCS_OK) return fail(st, "creating default scene");
    owned.emplace_back(cfg);
  }
  for (auto& cfg : owned) {
    for (const std::string& kv : overrides) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: override '%s' is not key=value\n", kv.c_str());
        return 1;
      }
      hcs_status st = hcs_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                     kv.substr(eq + 1).c_str());
      if (st != HCS_OK) return fail(st, "override " + kv);
    }
  }

  std::vector<const hcs_config*> raw;
  for (auto& c : owned) raw.push_back(c.get());
  hcs_status st = hcs_dataset_generate(raw.data(), static_cast<int>(raw.size()),
                                       level, frames, seed, out_path.c_str());
  if (st != HCS_OK) return fail(st, "generating dataset");

  uint32_t file_level = 0;
  uint64_t samples = 0;
  hcs_dataset_info(out_path.c_str(), &file_level, &samples);
  std::printf("wrote %s: level %u, %" PRIu64 " samples\n", out_path.c_str(),
              file_level, samples);
  return 0;
}

void fill_options(hcs_train_options& opt, int epochs, int batch, double lr,
                  uint64_t seed, int depth, int width,
                  const std::string& checkpoints, const std::string& ckpt_dir,
                  int record_every, int workers) {
  hcs_train_options_init(&opt);
  opt.epochs = epochs;
  opt.batch_size = batch;
  opt.learning_rate = lr;
  opt.seed = seed;
  opt.hidden_layers = depth - 1;  // depth counts weight layers, as in the sweep
  opt.hidden_width = width;
  opt.record_every = record_every;
  opt.workers = workers;
  if (!checkpoints.empty()) opt.checkpoint_epochs = checkpoints.c_str();
  if (!ckpt_dir.empty()) opt.checkpoint_dir = ckpt_dir.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical cloth simulation toolkit"};
  app.require_subcommand(1);

  // mesh
  auto* mesh = app.add_subcommand("mesh", "build a hierarchy and dump OBJ levels");
  int nx = 16, ny = 16, levels = 2;
  double width = 1.0, height = 1.0;
  std::string mesh_out;
  mesh->add_option("--nx", nx, "grid cells in x");
  mesh->add_option("--ny", ny, "grid cells in y");
  mesh->add_option("--width", width, "sheet width (m)");
  mesh->add_option("--height", height, "sheet height (m)");
  mesh->add_option("--levels", levels, "finer levels N");
  mesh->add_option("--out", mesh_out, "directory for per-level OBJ dumps");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a conventional or hybrid simulation");
  SceneArgs sim_scene;
  sim_scene.attach(simulate);
  std::string method;
  int frames = -1, sim_level = 0;
  int64_t seed = -1;
  std::string sim_out;
  bool quiet = false;
  simulate->add_option("--method", method, "admm | cg | hybrid");
  simulate->add_option("--frames", frames, "frame count (default: config)");
  simulate->add_option("--out", sim_out, "output directory for OBJ frames");
  simulate->add_option("--seed", seed, "seed override");
  simulate->add_option("--level", sim_level, "hierarchy level for conventional runs");
  simulate->add_flag("--quiet", quiet, "suppress per-frame timing log");

  // sample
  auto* sample = app.add_subcommand("sample", "generate a training dataset");
  std::vector<std::string> sample_scenes, sample_configs, sample_overrides;
  int sample_level = 1, sample_frames = 100;
  uint64_t sample_seed = 0;
  std::string sample_out = "dataset.hcsds";
  sample->add_option("--scene", sample_scenes, "built-in scene (repeatable)");
  sample->add_option("--config", sample_configs, "JSON config file (repeatable)");
  sample->add_option("--set", sample_overrides, "dotted-key override applied to every scene");
  sample->add_option("--level", sample_level, "target finer level");
  sample->add_option("--frames", sample_frames, "frames per scene");
  sample->add_option("--seed", sample_seed, "seed");
  sample->add_option("--out", sample_out, "dataset output path");

  // train
  auto* train = app.add_subcommand("train", "train a per-level model");
  std::string train_dataset, train_model_out = "model.hcsnn";
  std::string train_loss_csv, train_checkpoints, train_ckpt_dir;
  int train_epochs = 500, train_batch = 256, train_depth = 3, train_width = 32;
  int train_record_every = 0, train_workers = 1;
  double train_lr = 1e-3;
  uint64_t train_seed = 0;
  train->add_option("--dataset", train_dataset, "dataset file")->required();
  train->add_option("--out", train_model_out, "model output path");
  train->add_option("--loss-csv", train_loss_csv, "loss log CSV path");
  train->add_option("--epochs", train_epochs, "training epochs");
  train->add_option("--batch", train_batch, "batch size");
  train->add_option("--lr", train_lr, "learning rate");
  train->add_option("--seed", train_seed, "seed");
  train->add_option("--depth", train_depth, "FC layer count (weight layers)");
  train->add_option("--width", train_width, "hidden width");
  train->add_option("--checkpoints", train_checkpoints,
                    "comma list of checkpoint epochs, e.g. 100,1500,3000,5000");
  train->add_option("--checkpoint-dir", train_ckpt_dir, "checkpoint directory");
  train->add_option("--record-every", train_record_every,
                    "also log the loss every k epochs");
  train->add_option("--workers", train_workers, "parallel gradient chunks");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "depth/width architecture comparison");
  std::string sweep_dataset, sweep_out = "sweep";
  int sweep_epochs = 300, sweep_batch = 256, sweep_record = 10, sweep_workers = 1;
  double sweep_lr = 1e-3;
  uint64_t sweep_seed = 0;
  sweep->add_option("--dataset", sweep_dataset, "dataset file")->required();
  sweep->add_option("--out", sweep_out, "report directory");
  sweep->add_option("--epochs", sweep_epochs, "epochs per configuration");
  sweep->add_option("--batch", sweep_batch, "batch size");
  sweep->add_option("--lr", sweep_lr, "learning rate");
  sweep->add_option("--seed", sweep_seed, "seed");
  sweep->add_option("--record-every", sweep_record, "loss log cadence");
  sweep->add_option("--workers", sweep_workers, "parallel gradient chunks");

  // bench
  auto* bench = app.add_subcommand("bench", "CG vs ADMM vs hybrid timing");
  SceneArgs bench_scene;
  bench_scene.attach(bench);
  int bench_frames = 100, bench_warmup = 10;
  std::string bench_out = "bench.csv";
  bench->add_option("--frames", bench_frames, "timed frames");
  bench->add_option("--warmup", bench_warmup, "untimed warm-up frames");
  bench->add_option("--out", bench_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  if (mesh->parsed()) {
    return run_mesh(nx, ny, width, height, levels, mesh_out);
  }

  if (simulate->parsed()) {
    return run_simulate(sim_scene, method, frames, sim_out, seed, sim_level, quiet);
  }

  if (sample->parsed()) {
    return run_sample(sample_scenes, sample_configs, sample_overrides,
                      sample_level, sample_frames, sample_seed, sample_out);
  }

  if (train->parsed()) {
    hcs_train_options opt;
    fill_options(opt, train_epochs, train_batch, train_lr, train_seed,
                 train_depth, train_width, train_checkpoints, train_ckpt_dir,
                 train_record_every, train_workers);
    hcs_status st = hcs_train(train_dataset.c_str(), &opt,
                              train_model_out.c_str(),
                              train_loss_csv.empty() ? nullptr : train_loss_csv.c_str());
    if (st != HCS_OK) return fail(st, "training");
    std::printf("wrote %s\n", train_model_out.c_str());
    return 0;
  }

  if (sweep->parsed()) {
    hcs_train_options opt;
    fill_options(opt, sweep_epochs, sweep_batch, sweep_lr, sweep_seed, 3, 32,
                 "", "", sweep_record, sweep_workers);
    hcs_status st = hcs_sweep(sweep_dataset.c_str(), &opt, sweep_out.c_str());
    if (st != HCS_OK) return fail(st, "sweep");
    std::printf("wrote %s/sweep_summary.csv\n", sweep_out.c_str());
    return 0;
  }

  if (bench->parsed()) {
    ConfigPtr cfg;
    if (int rc = bench_scene.make(cfg)) return rc;
    hcs_status st = hcs_bench(cfg.get(), bench_frames, bench_warmup,
                              bench_out.c_str());
    if (st != HCS_OK) return fail(st, "bench");
    std::printf("wrote %s\n", bench_out.c_str());
    return 0;
  }

  return 0;
}
