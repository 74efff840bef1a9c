#pragma once

#include <vector>

#include "core/mesh.hpp"

namespace hcs {

enum class ConstraintKind { Spring, Bending };

/// Distance constraint between two masses. Springs sit on mesh edges; bending
/// is modeled as a cross-edge spring between the two vertices opposite an
/// interior edge. ADMM slack z and scaled dual u live here, weight w = sqrt(k).
struct Constraint {
  ConstraintKind kind = ConstraintKind::Spring;
  int a = 0;
  int b = 0;
  double rest = 0.0;       // meters
  double stiffness = 0.0;  // N/m
  double weight2 = 0.0;    // w^2 in the augmented term
  Vec3 z = Vec3::Zero();
  Vec3 u = Vec3::Zero();
};

/// One spring per deduplicated edge plus one bending cross-spring per interior
/// edge. Constraints with zero stiffness are dropped. Rest lengths come from
/// the mesh rest positions.
std::vector<Constraint> build_constraints(const TriMesh& mesh,
                                          double spring_stiffness,
                                          double bend_stiffness);

/// Sum of constraint energies: 1/2 k (|x_a - x_b| - rest)^2.
double constraint_energy(const std::vector<Vec3>& positions,
                         const std::vector<Constraint>& constraints);

/// Accumulates -grad of the constraint energy into `forces` (not cleared).
void add_elastic_forces(const std::vector<Vec3>& positions,
                        const std::vector<Constraint>& constraints,
                        std::vector<Vec3>& forces);

}  // namespace hcs
