#pragma once

#include <string>
#include <vector>

#include "core/collision.hpp"
#include "core/solver.hpp"

namespace hcs {

enum class PinMode { None, TopCorners, TopEdge, Custom };

/// Full scene description: geometry, material, solver, inference and output
/// settings. All physical quantities are SI. Built-in presets (see
/// scene_preset) cover the catalog scenes; JSON config files and dotted-key
/// overrides refine them.
struct SimConfig {
  std::string scene = "flag";

  // grid
  int nx = 16;
  int ny = 16;
  double width = 1.0;
  double height = 1.0;
  bool horizontal = false;   // lay the sheet flat (x/z plane) instead of hanging
  double plane_offset = 0.0; // y of the sheet when horizontal

  int levels = 2;  // finer levels N

  PinMode pin_mode = PinMode::TopCorners;
  std::vector<int> pinned;  // used when pin_mode == Custom

  // material
  double spring_stiffness = 500.0;
  double bend_stiffness = 5.0;
  double total_mass = 0.5;

  SolverParams solver;
  std::string method = "admm";  // admm | cg | hybrid

  std::vector<CollisionPrimitive> collisions;
  bool fine_collision_pass = false;  // optional post-projection of fine levels

  std::vector<std::string> model_paths;  // one per finer level, hybrid mode

  int frames = 100;
  std::string output_dir;
  uint64_t seed = 0;
  double velocity_jitter = 0.0;  // m/s, seeded initial velocity noise

  void validate() const;
};

/// Catalog: "flag" (two pinned top corners), "hang" (softer stiffness
/// variant of flag), "sphere" (horizontal sheet dropped on a sphere),
/// "stretch" (flag under strong gravity; over-stretch failure probe).
SimConfig scene_preset(const std::string& name);

SimConfig load_config(const std::string& path);

/// Applies "key=value" with dotted keys mirroring the JSON layout, e.g.
/// "grid.nx=8", "solver.admm_iterations=10", "material.spring_stiffness=200".
void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value);

/// Base mesh per the config: grid, orientation, pins.
TriMesh build_base_mesh(const SimConfig& config);

}  // namespace hcs
