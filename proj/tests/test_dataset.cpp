#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "core/rng.hpp"
#include "core/sim.hpp"

using namespace hcs;

namespace {

namespace fs = std::filesystem;

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

Dataset random_dataset(uint32_t level, size_t count, uint64_t seed) {
  Dataset d;
  d.level = level;
  std::mt19937_64 gen = seeded_rng(seed);
  d.samples.resize(count);
  for (auto& s : d.samples) {
    for (int k = 0; k < 9; ++k) {
      s.input[k] = static_cast<float>(uniform(gen, -1.0, 1.0));
      s.target[k] = static_cast<float>(uniform(gen, -1.0, 1.0));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("dataset file: round trip preserves every bit") {
  fs::path dir = fs::temp_directory_path() / "hcs_dataset_io";
  fs::create_directories(dir);
  std::string path = (dir / "d.hcsds").string();

  Dataset d = random_dataset(2, 137, 9);
  save_dataset(d, path);
  Dataset r = load_dataset(path);
  REQUIRE(r.level == d.level);
  REQUIRE(r.size() == d.size());
  REQUIRE(std::memcmp(r.samples.data(), d.samples.data(),
                      d.samples.size() * sizeof(TrainingSample)) == 0);
  fs::remove_all(dir);
}

TEST_CASE("dataset file: corruption errors") {
  fs::path dir = fs::temp_directory_path() / "hcs_dataset_errors";
  fs::create_directories(dir);
  std::string good = (dir / "good.hcsds").string();
  save_dataset(random_dataset(1, 10, 4), good);
  std::string bytes = read_bytes(good);

  {
    std::string path = (dir / "cut.hcsds").string();
    std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 7);
    try {
      load_dataset(path);
      FAIL("expected truncation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Truncated);
    }
  }
  {
    std::string path = (dir / "magic.hcsds").string();
    std::string bad = bytes;
    bad[3] = 'x';
    std::ofstream(path, std::ios::binary) << bad;
    try {
      load_dataset(path);
      FAIL("expected format error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Format);
    }
  }
  {
    std::string path = (dir / "extra.hcsds").string();
    std::ofstream(path, std::ios::binary) << bytes << "tail";
    try {
      load_dataset(path);
      FAIL("expected format error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Format);
    }
  }
  CHECK_THROWS_AS(load_dataset((dir / "missing.hcsds").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("generate_dataset: one sample per frame per parent triangle") {
  SimConfig cfg = scene_preset("flag");
  cfg.nx = 2;
  cfg.ny = 2;
  cfg.levels = 1;
  Dataset d = generate_dataset({cfg}, 1, 3, 0);
  CHECK(d.level == 1);
  CHECK(d.size() == 3u * 8u);  // 8 level-0 triangles
}

TEST_CASE("generate_dataset: zero-gravity rest scene yields zero samples") {
  SimConfig cfg = scene_preset("flag");
  cfg.nx = 2;
  cfg.ny = 2;
  cfg.levels = 1;
  cfg.solver.gravity = Vec3::Zero();
  Dataset d = generate_dataset({cfg}, 1, 2, 0);
  for (const TrainingSample& s : d.samples) {
    CHECK(s.input.isZero(0.0f));
    CHECK(s.target.isZero(0.0f));
  }
}

TEST_CASE("generate_dataset: deterministic bytes for a fixed seed") {
  fs::path dir = fs::temp_directory_path() / "hcs_dataset_det";
  fs::create_directories(dir);

  SimConfig cfg = scene_preset("flag");
  cfg.nx = 3;
  cfg.ny = 3;
  cfg.levels = 1;
  cfg.velocity_jitter = 0.05;

  std::string a = (dir / "a.hcsds").string();
  std::string b = (dir / "b.hcsds").string();
  save_dataset(generate_dataset({cfg}, 1, 4, 11), a);
  save_dataset(generate_dataset({cfg}, 1, 4, 11), b);
  CHECK(read_bytes(a) == read_bytes(b));

  std::string c = (dir / "c.hcsds").string();
  save_dataset(generate_dataset({cfg}, 1, 4, 12), c);
  CHECK(read_bytes(a) != read_bytes(c));  // the seed matters through the jitter
  fs::remove_all(dir);
}

TEST_CASE("generate_dataset: diverging source names the scene") {
  SimConfig cfg = scene_preset("flag");
  cfg.nx = 2;
  cfg.ny = 2;
  cfg.levels = 1;
  cfg.solver.gravity = Vec3(0, -1e308, 0);  // overflows the global step
  try {
    generate_dataset({cfg}, 1, 3, 0);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Diverged);
    CHECK(std::string(e.what()).find("scene 0") != std::string::npos);
  }
}

TEST_CASE("generate_dataset: scene list and level guards") {
  SimConfig cfg = scene_preset("flag");
  cfg.levels = 1;
  CHECK_THROWS_AS(generate_dataset({}, 1, 2, 0), Error);
  CHECK_THROWS_AS(generate_dataset({cfg}, 0, 2, 0), Error);
  CHECK_THROWS_AS(generate_dataset({cfg}, 2, 2, 0), Error);  // target beyond levels
}
