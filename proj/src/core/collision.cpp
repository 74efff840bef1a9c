#include "core/collision.hpp"

#include <cmath>

namespace hcs {

CollisionPrimitive make_sphere(const Vec3& center, double radius,
                               double friction) {
  if (radius <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sphere radius must be > 0");
  }
  if (friction < 0.0 || friction > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "friction must be in [0, 1]");
  }
  CollisionPrimitive p;
  p.kind = CollisionPrimitive::Kind::Sphere;
  p.center = center;
  p.radius = radius;
  p.friction = friction;
  return p;
}

CollisionPrimitive make_half_space(const Vec3& normal, double offset,
                                   double friction) {
  double len = normal.norm();
  if (len <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "half-space normal must be nonzero");
  }
  if (friction < 0.0 || friction > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "friction must be in [0, 1]");
  }
  CollisionPrimitive p;
  p.kind = CollisionPrimitive::Kind::HalfSpace;
  p.normal = normal / len;
  p.offset = offset;
  p.friction = friction;
  return p;
}

namespace {

inline void apply_contact(Vec3& velocity, const Vec3& normal, double friction) {
  double vn = velocity.dot(normal);
  Vec3 tangential = velocity - vn * normal;
  if (vn < 0.0) vn = 0.0;  // keep separating motion
  velocity = vn * normal + (1.0 - friction) * tangential;
}

}  // namespace

void resolve_collisions(std::vector<Vec3>& positions,
                        std::vector<Vec3>& velocities,
                        const std::vector<CollisionPrimitive>& primitives) {
  const bool with_velocities = !velocities.empty();
  for (size_t i = 0; i < positions.size(); ++i) {
    for (const CollisionPrimitive& prim : primitives) {
      if (prim.kind == CollisionPrimitive::Kind::Sphere) {
        Vec3 d = positions[i] - prim.center;
        double dist = d.norm();
        if (dist >= prim.radius) continue;
        Vec3 n = dist > 0.0 ? Vec3(d / dist) : Vec3::UnitY();
        positions[i] = prim.center + prim.radius * n;
        if (with_velocities) apply_contact(velocities[i], n, prim.friction);
      } else {
        double s = positions[i].dot(prim.normal) - prim.offset;
        if (s >= 0.0) continue;
        positions[i] -= s * prim.normal;
        if (with_velocities) apply_contact(velocities[i], prim.normal, prim.friction);
      }
    }
  }
}

}  // namespace hcs
