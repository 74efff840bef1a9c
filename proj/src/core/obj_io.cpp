#include "core/obj_io.hpp"

#include <cstdio>
#include <memory>

namespace hcs {

void write_obj(const std::string& path, const std::vector<Vec3>& vertices,
               const std::vector<Tri>& triangles) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  }
  for (const Vec3& v : vertices) {
    if (std::fprintf(f.get(), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z()) < 0) {
      throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
  }
  for (const Tri& t : triangles) {
    if (std::fprintf(f.get(), "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1) < 0) {
      throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
  }
}

std::string frame_obj_name(int frame_index, int level) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame_%05d_l%d.obj", frame_index, level);
  return buf;
}

}  // namespace hcs
