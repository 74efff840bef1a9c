#include "core/constraints.hpp"

#include <cmath>
#include <unordered_map>

namespace hcs {

namespace {

Constraint make_distance_constraint(ConstraintKind kind, int a, int b,
                                    double stiffness,
                                    const std::vector<Vec3>& rest_positions) {
  Constraint c;
  c.kind = kind;
  c.a = a;
  c.b = b;
  c.rest = (rest_positions[a] - rest_positions[b]).norm();
  c.stiffness = stiffness;
  c.weight2 = stiffness;  // w = sqrt(k)
  c.z = rest_positions[a] - rest_positions[b];
  return c;
}

}  // namespace

std::vector<Constraint> build_constraints(const TriMesh& mesh,
                                          double spring_stiffness,
                                          double bend_stiffness) {
  if (spring_stiffness < 0.0 || bend_stiffness < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "stiffness must be >= 0");
  }
  std::vector<Constraint> constraints;
  constraints.reserve(mesh.edges.size() * 2);

  if (spring_stiffness > 0.0) {
    for (const Edge& e : mesh.edges) {
      constraints.push_back(make_distance_constraint(
          ConstraintKind::Spring, e[0], e[1], spring_stiffness, mesh.vertices));
    }
  }

  if (bend_stiffness > 0.0) {
    // Opposite vertex per (edge, incident triangle); interior edges have two.
    std::unordered_map<uint64_t, std::pair<int, int>> opposite;
    opposite.reserve(mesh.edges.size() * 2);
    auto key = [](int a, int b) {
      if (a > b) std::swap(a, b);
      return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
    };
    for (const Edge& e : mesh.edges) {
      opposite.emplace(key(e[0], e[1]), std::make_pair(-1, -1));
    }
    for (const Tri& t : mesh.triangles) {
      for (int k = 0; k < 3; ++k) {
        auto& slot = opposite.at(key(t[k], t[(k + 1) % 3]));
        int opp = t[(k + 2) % 3];
        (slot.first < 0 ? slot.first : slot.second) = opp;
      }
    }
    for (const Edge& e : mesh.edges) {
      const auto& slot = opposite.at(key(e[0], e[1]));
      if (slot.first >= 0 && slot.second >= 0) {
        constraints.push_back(make_distance_constraint(
            ConstraintKind::Bending, slot.first, slot.second, bend_stiffness,
            mesh.vertices));
      }
    }
  }
  return constraints;
}

double constraint_energy(const std::vector<Vec3>& positions,
                         const std::vector<Constraint>& constraints) {
  double energy = 0.0;
  for (const Constraint& c : constraints) {
    double stretch = (positions[c.a] - positions[c.b]).norm() - c.rest;
    energy += 0.5 * c.stiffness * stretch * stretch;
  }
  return energy;
}

void add_elastic_forces(const std::vector<Vec3>& positions,
                        const std::vector<Constraint>& constraints,
                        std::vector<Vec3>& forces) {
  for (const Constraint& c : constraints) {
    Vec3 d = positions[c.a] - positions[c.b];
    double len = d.norm();
    if (len <= 0.0) continue;  // degenerate; no defined direction
    Vec3 f = (-c.stiffness * (len - c.rest) / len) * d;
    forces[c.a] += f;
    forces[c.b] -= f;
  }
}

}  // namespace hcs
