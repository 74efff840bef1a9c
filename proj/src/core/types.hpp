#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hcs {

using Vec3 = Eigen::Vector3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Tri = std::array<int, 3>;
using Edge = std::array<int, 2>;  // canonical form: [0] < [1]

static_assert(sizeof(Vec3) == 3 * sizeof(double),
              "Vec3 must be tightly packed for the C API position views");

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  Truncated,
  Diverged,
  Inference,
  Topology,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hcs
