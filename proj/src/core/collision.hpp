#pragma once

#include <vector>

#include "core/types.hpp"

namespace hcs {

/// Analytic collision shape. Spheres keep vertices outside radius `radius`
/// around `center`; half-spaces keep them on the side `normal` points to,
/// at signed offset >= `offset` (a floor at height y0 is normal (0,1,0),
/// offset y0).
struct CollisionPrimitive {
  enum class Kind { Sphere, HalfSpace };
  Kind kind = Kind::HalfSpace;
  Vec3 center = Vec3::Zero();  // sphere center / unused
  Vec3 normal = Vec3::UnitY();
  double radius = 0.0;
  double offset = 0.0;
  double friction = 0.0;  // in [0, 1]
};

CollisionPrimitive make_sphere(const Vec3& center, double radius,
                               double friction);
CollisionPrimitive make_half_space(const Vec3& normal, double offset,
                                   double friction);

/// Projects penetrating vertices to the surface along the outward normal,
/// removes the inward normal velocity component, and scales the tangential
/// velocity by (1 - friction). Pass an empty velocity vector to correct
/// positions only.
void resolve_collisions(std::vector<Vec3>& positions,
                        std::vector<Vec3>& velocities,
                        const std::vector<CollisionPrimitive>& primitives);

}  // namespace hcs
