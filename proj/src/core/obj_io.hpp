#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace hcs {

/// Wavefront OBJ: one `v x y z` line per vertex (17 significant digits, so
/// doubles round-trip), one 1-based `f a b c` line per triangle. Byte-stable
/// for identical input.
void write_obj(const std::string& path, const std::vector<Vec3>& vertices,
               const std::vector<Tri>& triangles);

/// "frame_%05d_l%d.obj"
std::string frame_obj_name(int frame_index, int level);

}  // namespace hcs
