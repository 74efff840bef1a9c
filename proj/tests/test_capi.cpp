#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "hcs/hcs.h"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::string read_bytes(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("capi: hierarchy lifecycle and counts") {
  hcs_hierarchy* h = nullptr;
  REQUIRE(hcs_hierarchy_create_grid(2, 2, 1.0, 1.0, 2, &h) == HCS_OK);
  REQUIRE(h != nullptr);
  CHECK(hcs_hierarchy_levels(h) == 3);

  uint64_t v = 0, e = 0, f = 0;
  REQUIRE(hcs_hierarchy_counts(h, 0, &v, &e, &f) == HCS_OK);
  CHECK(v == 9);
  CHECK(e == 16);
  CHECK(f == 8);
  REQUIRE(hcs_hierarchy_counts(h, 2, &v, &e, &f) == HCS_OK);
  CHECK(v == 81);

  CHECK(hcs_hierarchy_counts(h, 5, &v, &e, &f) == HCS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(hcs_last_error()) > 0);

  TempDir dir("hcs_capi_h");
  CHECK(hcs_hierarchy_export_obj(h, 1, dir.file("l1.obj").c_str()) == HCS_OK);
  CHECK(read_bytes(dir.file("l1.obj")).rfind("v ", 0) == 0);
  hcs_hierarchy_destroy(h);

  hcs_hierarchy* bad = nullptr;
  CHECK(hcs_hierarchy_create_grid(0, 2, 1.0, 1.0, 1, &bad) ==
        HCS_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
}

TEST_CASE("capi: config create, set, load") {
  hcs_config* cfg = nullptr;
  REQUIRE(hcs_config_create("flag", &cfg) == HCS_OK);
  CHECK(hcs_config_frames(cfg) == 100);
  CHECK(hcs_config_set(cfg, "frames", "7") == HCS_OK);
  CHECK(hcs_config_frames(cfg) == 7);
  CHECK(hcs_config_set(cfg, "method", "teleport") == HCS_ERR_INVALID_ARGUMENT);
  hcs_config_destroy(cfg);

  CHECK(hcs_config_create("bogus", &cfg) == HCS_ERR_INVALID_ARGUMENT);
  CHECK(hcs_config_load("/does/not/exist.json", &cfg) == HCS_ERR_IO);
}

TEST_CASE("capi: simulation stepping and position views") {
  hcs_config* cfg = nullptr;
  REQUIRE(hcs_config_create("flag", &cfg) == HCS_OK);
  hcs_config_set(cfg, "grid.nx", "4");
  hcs_config_set(cfg, "grid.ny", "4");
  hcs_config_set(cfg, "levels", "0");

  hcs_sim* sim = nullptr;
  REQUIRE(hcs_sim_create(cfg, "admm", 0, &sim) == HCS_OK);
  CHECK(hcs_sim_frame(sim) == 0);
  REQUIRE(hcs_sim_step(sim) == HCS_OK);
  CHECK(hcs_sim_frame(sim) == 1);

  const double* xyz = nullptr;
  uint64_t count = 0;
  REQUIRE(hcs_sim_positions(sim, 0, &xyz, &count) == HCS_OK);
  REQUIRE(count == 25);
  CHECK(xyz[0] == 0.0);  // pinned corner x
  CHECK(xyz[1] == 0.0);  // pinned corner y

  TempDir dir("hcs_capi_sim");
  REQUIRE(hcs_sim_export_frame(sim, dir.path.string().c_str()) == HCS_OK);
  CHECK(fs::exists(dir.path / "frame_00001_l0.obj"));
  hcs_sim_destroy(sim);
  hcs_config_destroy(cfg);
}

TEST_CASE("capi: models") {
  TempDir dir("hcs_capi_model");
  hcs_model* m = nullptr;
  REQUIRE(hcs_model_create(1, 2, 32, 99, &m) == HCS_OK);
  CHECK(hcs_model_level(m) == 1);
  REQUIRE(hcs_model_save(m, dir.file("m.hcsnn").c_str()) == HCS_OK);
  hcs_model_destroy(m);

  hcs_model* loaded = nullptr;
  REQUIRE(hcs_model_load(dir.file("m.hcsnn").c_str(), &loaded) == HCS_OK);
  CHECK(hcs_model_level(loaded) == 1);
  hcs_model_destroy(loaded);

  CHECK(hcs_model_load(dir.file("missing.hcsnn").c_str(), &loaded) == HCS_ERR_IO);

  std::string full = read_bytes(dir.file("m.hcsnn"));
  std::ofstream(dir.file("cut.hcsnn"), std::ios::binary)
      << full.substr(0, full.size() / 3);
  CHECK(hcs_model_load(dir.file("cut.hcsnn").c_str(), &loaded) ==
        HCS_ERR_TRUNCATED);

  CHECK(hcs_model_create(1, 0, 32, 0, &m) == HCS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("capi: dataset, training, sweep, bench end to end") {
  TempDir dir("hcs_capi_pipeline");

  hcs_config* cfg = nullptr;
  REQUIRE(hcs_config_create("flag", &cfg) == HCS_OK);
  hcs_config_set(cfg, "grid.nx", "3");
  hcs_config_set(cfg, "grid.ny", "3");
  hcs_config_set(cfg, "levels", "1");

  const hcs_config* cfgs[1] = {cfg};
  std::string ds = dir.file("d.hcsds");
  REQUIRE(hcs_dataset_generate(cfgs, 1, 1, 10, 5, ds.c_str()) == HCS_OK);

  uint32_t level = 0;
  uint64_t samples = 0;
  REQUIRE(hcs_dataset_info(ds.c_str(), &level, &samples) == HCS_OK);
  CHECK(level == 1);
  CHECK(samples == 10u * 18u);  // 3x3 grid has 18 level-0 triangles

  hcs_train_options opt;
  hcs_train_options_init(&opt);
  opt.epochs = 8;
  opt.batch_size = 32;
  opt.seed = 2;
  std::string model_path = dir.file("m.hcsnn");
  std::string loss_path = dir.file("loss.csv");
  REQUIRE(hcs_train(ds.c_str(), &opt, model_path.c_str(), loss_path.c_str()) ==
          HCS_OK);
  CHECK(read_bytes(loss_path).rfind("epoch,loss\n", 0) == 0);

  hcs_model* m = nullptr;
  REQUIRE(hcs_model_load(model_path.c_str(), &m) == HCS_OK);
  CHECK(hcs_model_level(m) == 1);
  hcs_model_destroy(m);

  // hybrid bench through the C surface
  std::string models_json = "[\"" + model_path + "\"]";
  REQUIRE(hcs_config_set(cfg, "models", models_json.c_str()) == HCS_OK);
  std::string bench_csv = dir.file("bench.csv");
  REQUIRE(hcs_bench(cfg, 2, 1, bench_csv.c_str()) == HCS_OK);
  CHECK(read_bytes(bench_csv).rfind("method,masses,", 0) == 0);

  opt.epochs = 2;
  opt.record_every = 1;
  REQUIRE(hcs_sweep(ds.c_str(), &opt, dir.file("sweep").c_str()) == HCS_OK);
  CHECK(fs::exists(dir.path / "sweep" / "sweep_summary.csv"));
  CHECK(fs::exists(dir.path / "sweep" / "depth_5.csv"));

  hcs_config_destroy(cfg);
}

TEST_CASE("capi: training determinism at the file level") {
  TempDir dir("hcs_capi_det");
  hcs_config* cfg = nullptr;
  REQUIRE(hcs_config_create("flag", &cfg) == HCS_OK);
  hcs_config_set(cfg, "grid.nx", "3");
  hcs_config_set(cfg, "grid.ny", "3");
  hcs_config_set(cfg, "levels", "1");
  const hcs_config* cfgs[1] = {cfg};

  std::string d1 = dir.file("d1.hcsds"), d2 = dir.file("d2.hcsds");
  REQUIRE(hcs_dataset_generate(cfgs, 1, 1, 6, 17, d1.c_str()) == HCS_OK);
  REQUIRE(hcs_dataset_generate(cfgs, 1, 1, 6, 17, d2.c_str()) == HCS_OK);
  CHECK(read_bytes(d1) == read_bytes(d2));

  hcs_train_options opt;
  hcs_train_options_init(&opt);
  opt.epochs = 6;
  opt.seed = 3;
  std::string m1 = dir.file("m1.hcsnn"), m2 = dir.file("m2.hcsnn");
  std::string l1 = dir.file("l1.csv"), l2 = dir.file("l2.csv");
  REQUIRE(hcs_train(d1.c_str(), &opt, m1.c_str(), l1.c_str()) == HCS_OK);
  REQUIRE(hcs_train(d1.c_str(), &opt, m2.c_str(), l2.c_str()) == HCS_OK);
  CHECK(read_bytes(m1) == read_bytes(m2));
  CHECK(read_bytes(l1) == read_bytes(l2));

  hcs_config_destroy(cfg);
}

TEST_CASE("capi: status strings and version") {
  CHECK(std::string(hcs_status_string(HCS_OK)) == "ok");
  CHECK(std::string(hcs_status_string(HCS_ERR_DIVERGED)) == "simulation diverged");
  CHECK(std::strlen(hcs_version()) > 0);
}
