#include "core/scene.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace hcs {

using nlohmann::json;

void SimConfig::validate() const {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid cells must be >= 1");
  if (width <= 0.0 || height <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "levels must be >= 0");
  if (spring_stiffness < 0.0 || bend_stiffness < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "stiffness must be >= 0");
  }
  if (total_mass <= 0.0) throw Error(ErrorCode::InvalidArgument, "total mass must be > 0");
  if (solver.dt <= 0.0) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  if (solver.admm_iterations < 1 || solver.cg_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "iteration counts must be >= 1");
  }
  if (frames < 0) throw Error(ErrorCode::InvalidArgument, "frames must be >= 0");
  if (method != "admm" && method != "cg" && method != "hybrid") {
    throw Error(ErrorCode::InvalidArgument, "method must be admm, cg or hybrid");
  }
  if (method == "hybrid" && !model_paths.empty() &&
      static_cast<int>(model_paths.size()) != levels) {
    throw Error(ErrorCode::InvalidArgument,
                "hybrid mode needs one model path per finer level");
  }
}

SimConfig scene_preset(const std::string& name) {
  SimConfig cfg;
  cfg.scene = name;
  if (name == "flag") {
    // defaults are the flag
  } else if (name == "hang") {
    cfg.nx = 12;
    cfg.ny = 12;
    cfg.spring_stiffness = 150.0;
    cfg.bend_stiffness = 1.0;
  } else if (name == "sphere") {
    cfg.nx = 12;
    cfg.ny = 12;
    cfg.horizontal = true;
    cfg.plane_offset = 0.45;
    cfg.pin_mode = PinMode::None;
    cfg.collisions.push_back(make_sphere(Vec3(0.5, 0.0, 0.5), 0.3, 0.2));
    cfg.frames = 200;
  } else if (name == "stretch") {
    cfg.solver.gravity = Vec3(0.0, -58.8, 0.0);  // ~6 g over-stretch probe
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scene '" + name + "'");
  }
  return cfg;
}

namespace {

PinMode pin_mode_from_string(const std::string& s) {
  if (s == "none") return PinMode::None;
  if (s == "top_corners") return PinMode::TopCorners;
  if (s == "top_edge") return PinMode::TopEdge;
  if (s == "custom") return PinMode::Custom;
  throw Error(ErrorCode::InvalidArgument, "unknown pin mode '" + s + "'");
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::Format, "expected a 3-element array");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void parse_into(SimConfig& cfg, const json& j) {
  if (j.contains("scene")) {
    cfg = scene_preset(j.at("scene").get<std::string>());
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.contains("nx")) cfg.nx = g.at("nx").get<int>();
    if (g.contains("ny")) cfg.ny = g.at("ny").get<int>();
    if (g.contains("width")) cfg.width = g.at("width").get<double>();
    if (g.contains("height")) cfg.height = g.at("height").get<double>();
    if (g.contains("horizontal")) cfg.horizontal = g.at("horizontal").get<bool>();
    if (g.contains("plane_offset")) cfg.plane_offset = g.at("plane_offset").get<double>();
  }
  if (j.contains("levels")) cfg.levels = j.at("levels").get<int>();
  if (j.contains("pins")) {
    const json& p = j.at("pins");
    if (p.is_string()) {
      cfg.pin_mode = pin_mode_from_string(p.get<std::string>());
    } else {
      cfg.pin_mode = PinMode::Custom;
      cfg.pinned = p.get<std::vector<int>>();
    }
  }
  if (j.contains("material")) {
    const json& m = j.at("material");
    if (m.contains("spring_stiffness")) {
      cfg.spring_stiffness = m.at("spring_stiffness").get<double>();
    }
    if (m.contains("bend_stiffness")) {
      cfg.bend_stiffness = m.at("bend_stiffness").get<double>();
    }
    if (m.contains("total_mass")) cfg.total_mass = m.at("total_mass").get<double>();
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("dt")) cfg.solver.dt = s.at("dt").get<double>();
    if (s.contains("gravity")) cfg.solver.gravity = vec3_from_json(s.at("gravity"));
    if (s.contains("admm_iterations")) {
      cfg.solver.admm_iterations = s.at("admm_iterations").get<int>();
    }
    if (s.contains("cg_iterations")) {
      cfg.solver.cg_iterations = s.at("cg_iterations").get<int>();
    }
    if (s.contains("cg_tolerance")) {
      cfg.solver.cg_tolerance = s.at("cg_tolerance").get<double>();
    }
    if (s.contains("warm_start")) cfg.solver.warm_start = s.at("warm_start").get<bool>();
    if (s.contains("threads")) cfg.solver.threads = s.at("threads").get<int>();
  }
  if (j.contains("method")) cfg.method = j.at("method").get<std::string>();
  if (j.contains("collisions")) {
    cfg.collisions.clear();
    for (const json& c : j.at("collisions")) {
      std::string kind = c.at("kind").get<std::string>();
      double friction = c.value("friction", 0.0);
      if (kind == "sphere") {
        cfg.collisions.push_back(make_sphere(vec3_from_json(c.at("center")),
                                             c.at("radius").get<double>(), friction));
      } else if (kind == "half_space") {
        cfg.collisions.push_back(make_half_space(vec3_from_json(c.at("normal")),
                                                 c.value("offset", 0.0), friction));
      } else {
        throw Error(ErrorCode::Format, "unknown collision kind '" + kind + "'");
      }
    }
  }
  if (j.contains("fine_collision_pass")) {
    cfg.fine_collision_pass = j.at("fine_collision_pass").get<bool>();
  }
  if (j.contains("models")) {
    cfg.model_paths = j.at("models").get<std::vector<std::string>>();
  }
  if (j.contains("frames")) cfg.frames = j.at("frames").get<int>();
  if (j.contains("output")) cfg.output_dir = j.at("output").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("velocity_jitter")) {
    cfg.velocity_jitter = j.at("velocity_jitter").get<double>();
  }
}

}  // namespace

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, "config parse error in '" + path + "': " + e.what());
  }
  SimConfig cfg;
  try {
    parse_into(cfg, j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, "config error in '" + path + "': " + e.what());
  }
  cfg.validate();
  return cfg;
}

void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value) {
  // Rebuild a one-entry nested JSON object from the dotted key, then reuse
  // the config parser so overrides and files share one code path.
  json leaf;
  try {
    leaf = json::parse(value);
  } catch (const json::exception&) {
    leaf = value;  // bare strings are fine
  }
  json root;
  json* node = &root;
  size_t start = 0;
  while (true) {
    size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot - start);
    if (part.empty()) {
      throw Error(ErrorCode::InvalidArgument, "bad override key '" + key + "'");
    }
    if (dot == std::string::npos) {
      (*node)[part] = leaf;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  try {
    parse_into(config, root);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument,
                "override '" + key + "' failed: " + e.what());
  }
  config.validate();
}

TriMesh build_base_mesh(const SimConfig& config) {
  TriMesh mesh = build_grid_mesh(config.nx, config.ny, config.width, config.height);
  if (config.horizontal) {
    // Lay the sheet flat: (x, -y, 0) -> (x, plane_offset, -y).
    for (Vec3& v : mesh.vertices) {
      v = Vec3(v.x(), config.plane_offset, -v.y());
    }
  }
  switch (config.pin_mode) {
    case PinMode::None:
      break;
    case PinMode::TopCorners:
      mesh.pinned = {0, config.nx};
      break;
    case PinMode::TopEdge:
      for (int i = 0; i <= config.nx; ++i) mesh.pinned.push_back(i);
      break;
    case PinMode::Custom:
      mesh.pinned = config.pinned;
      break;
  }
  std::sort(mesh.pinned.begin(), mesh.pinned.end());
  mesh.pinned.erase(std::unique(mesh.pinned.begin(), mesh.pinned.end()),
                    mesh.pinned.end());
  for (int v : mesh.pinned) {
    if (v < 0 || v >= mesh.vertex_count()) {
      throw Error(ErrorCode::InvalidArgument,
                  "pinned vertex " + std::to_string(v) + " out of range");
    }
  }
  return mesh;
}

}  // namespace hcs
