#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "core/rng.hpp"
#include "core/solver.hpp"

using namespace hcs;

namespace {

TriMesh single_spring_mesh() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(0, -1, 0)};
  m.edges = {{0, 1}};
  m.pinned = {0};
  return m;
}

SolverState random_state(const TriMesh& mesh, std::mt19937_64& gen,
                         double wobble) {
  SolverState s = make_state(mesh, 0.4);
  for (size_t i = 0; i < s.positions.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      s.positions[i][k] += uniform(gen, -wobble, wobble);
      s.velocities[i][k] = uniform(gen, -wobble, wobble);
      s.predicted[i][k] = s.positions[i][k] + uniform(gen, -wobble, wobble);
    }
  }
  return s;
}

double relative_error(double a, double b) {
  double denom = std::max(std::abs(a), std::abs(b));
  if (denom < 1e-12) return 0.0;
  return std::abs(a - b) / denom;
}

}  // namespace

TEST_CASE("predict: gravity kinematics") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0)};
  SolverState s = make_state(m, 1.0);
  SolverParams p;
  p.dt = 0.1;
  p.gravity = Vec3(0, -9.8, 0);
  predict(s, m, p);
  CHECK(s.velocities[0].isApprox(Vec3(0, -0.98, 0), 1e-15));
  CHECK(s.predicted[0].isApprox(Vec3(0, -0.098, 0), 1e-15));
}

TEST_CASE("predict: drift without gravity") {
  TriMesh m;
  m.vertices = {Vec3(1, 2, 3)};
  SolverState s = make_state(m, 1.0);
  s.velocities[0] = Vec3(1, 0, 0);
  SolverParams p;
  p.dt = 0.5;
  p.gravity = Vec3::Zero();
  predict(s, m, p);
  CHECK(s.predicted[0] == Vec3(1.5, 2, 3));
}

TEST_CASE("predict: pinned vertex stays put") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0)};
  m.pinned = {0};
  SolverState s = make_state(m, 1.0);
  s.velocities[0] = Vec3(5, 5, 5);
  SolverParams p;
  predict(s, m, p);
  CHECK(s.predicted[0] == Vec3(0, 0, 0));
  CHECK(s.velocities[0] == Vec3(0, 0, 0));
}

TEST_CASE("objective: zero at rest") {
  TriMesh m = single_spring_mesh();
  std::vector<Constraint> cs = build_constraints(m, 100.0, 0.0);
  SolverState s = make_state(m, 0.2);
  CHECK(step_objective(s.positions, cs, s.positions, s.masses, 0.01) == 0.0);
}

TEST_CASE("objective: stretched spring energy") {
  TriMesh m = single_spring_mesh();
  std::vector<Constraint> cs = build_constraints(m, 10.0, 0.0);
  SolverState s = make_state(m, 0.2);
  s.positions[1] = Vec3(0, -2, 0);  // 2x rest length 1
  s.predicted = s.positions;        // no inertia contribution
  CHECK(step_objective(s.positions, cs, s.predicted, s.masses, 0.01) ==
        doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("objective gradient matches central finite differences") {
  std::mt19937_64 gen(2024);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    // Half the trials use grid constraints (springs + bending), half use
    // random spring graphs on ~10 vertices.
    TriMesh mesh;
    std::vector<Constraint> cs;
    if (trial % 2 == 0) {
      mesh = build_grid_mesh(2, 2, 1.0, 1.0);
      cs = build_constraints(mesh, uniform(gen, 20.0, 200.0),
                             uniform(gen, 1.0, 20.0));
    } else {
      mesh.vertices.resize(10);
      for (auto& v : mesh.vertices) {
        v = Vec3(uniform(gen, -1, 1), uniform(gen, -1, 1), uniform(gen, -1, 1));
      }
      for (int e = 0; e < 14; ++e) {
        int a = static_cast<int>(gen() % 10);
        int b = static_cast<int>(gen() % 10);
        if (a == b) continue;
        Constraint c;
        c.kind = e % 3 == 0 ? ConstraintKind::Bending : ConstraintKind::Spring;
        c.a = a;
        c.b = b;
        c.rest = uniform(gen, 0.3, 1.5);
        c.stiffness = uniform(gen, 10.0, 300.0);
        c.weight2 = c.stiffness;
        cs.push_back(c);
      }
    }
    SolverState s = random_state(mesh, gen, 0.2);
    const double dt = 1.0 / 150.0;

    std::vector<Vec3> analytic;
    step_objective_gradient(s.positions, cs, s.predicted, s.masses, dt, analytic);

    double max_rel = 0.0;
    for (size_t i = 0; i < s.positions.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        std::vector<Vec3> plus = s.positions, minus = s.positions;
        plus[i][k] += h;
        minus[i][k] -= h;
        double fd = (step_objective(plus, cs, s.predicted, s.masses, dt) -
                     step_objective(minus, cs, s.predicted, s.masses, dt)) /
                    (2.0 * h);
        max_rel = std::max(max_rel, relative_error(fd, analytic[i][k]));
      }
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("ADMM: no constraints returns x_tilde exactly") {
  TriMesh m = build_grid_mesh(2, 2, 1.0, 1.0);
  std::mt19937_64 gen(7);
  SolverState s = random_state(m, gen, 0.3);
  SolverParams p;
  AdmmSolver solver(m, {}, s.masses, p);
  std::vector<Vec3> expect = s.predicted;
  StepInfo info = solver.step(s);
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(s.positions[i] == expect[i]);
  }
  CHECK(info.objective_returned == info.objective_predicted);
}

TEST_CASE("CG: no constraints returns x_tilde exactly") {
  TriMesh m = build_grid_mesh(2, 2, 1.0, 1.0);
  std::mt19937_64 gen(8);
  SolverState s = random_state(m, gen, 0.3);
  SolverParams p;
  CgSolver solver(m, {}, s.masses, p);
  std::vector<Vec3> expect = s.predicted;
  solver.step(s);
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(s.positions[i] == expect[i]);
  }
}

TEST_CASE("statics: hanging spring settles at mg/k for both solvers") {
  TriMesh m = single_spring_mesh();
  const double k = 100.0, mass = 0.1, g = 9.8;
  std::vector<Constraint> cs = build_constraints(m, k, 0.0);
  SolverParams p;  // dt = 1/150, admm 20 iterations, cg 100

  auto settled_extension = [&](SolveMethod method) {
    SolverState s = make_state(m, 2.0 * mass);  // uniform mass 0.1 per vertex
    CoarseStepper stepper(m, cs, s.masses, p, {}, method);
    for (int step = 0; step < 4000; ++step) stepper.step(s);
    return -1.0 - s.positions[1].y();  // stretch below rest length 1
  };

  double admm_ext = settled_extension(SolveMethod::Admm);
  double cg_ext = settled_extension(SolveMethod::Cg);
  const double expect = mass * g / k;  // 0.0098
  CHECK(std::abs(admm_ext - expect) < 1e-4);
  CHECK(std::abs(cg_ext - expect) < 1e-4);
  CHECK(std::abs(admm_ext - cg_ext) < 1e-3);
}

TEST_CASE("statics: ADMM and CG hanging-cloth equilibria agree") {
  TriMesh m = build_grid_mesh(5, 5, 1.0, 1.0);
  m.pinned = {0, 5};
  std::vector<Constraint> cs = build_constraints(m, 150.0, 1.0);
  SolverParams p;

  auto settle = [&](SolveMethod method) {
    SolverState s = make_state(m, 0.3);
    CoarseStepper stepper(m, cs, s.masses, p, {}, method);
    for (int step = 0; step < 4000; ++step) stepper.step(s);
    return s.positions;
  };

  auto admm_pos = settle(SolveMethod::Admm);
  auto cg_pos = settle(SolveMethod::Cg);
  double max_diff = 0.0;
  for (size_t i = 0; i < admm_pos.size(); ++i) {
    max_diff = std::max(max_diff, (admm_pos[i] - cg_pos[i]).norm());
  }
  CHECK(max_diff < 1e-3);
}

TEST_CASE("CG matches a dense direct solve of the same system") {
  TriMesh m = build_grid_mesh(3, 2, 1.0, 0.8);  // 12 vertices
  m.pinned = {0, 3};
  std::vector<Constraint> cs = build_constraints(m, 80.0, 2.0);
  std::mt19937_64 gen(99);
  SolverState s = random_state(m, gen, 0.15);
  SolverParams p;
  p.gravity = Vec3::Zero();  // predict() then leaves the velocities alone
  p.cg_iterations = 5000;
  p.cg_tolerance = 1e-15;
  CgSolver solver(m, cs, s.masses, p);

  const size_t n = s.positions.size();
  const auto& free_verts = solver.free_vertices();
  const int nf = static_cast<int>(free_verts.size());

  // Assemble the dense operator column by column and the matching rhs.
  Eigen::MatrixXd dense(3 * nf, 3 * nf);
  std::vector<Vec3> basis(n, Vec3::Zero()), out(n);
  for (int c = 0; c < nf; ++c) {
    for (int k = 0; k < 3; ++k) {
      basis[free_verts[c]][k] = 1.0;
      solver.apply_system(s.positions, basis, out);
      for (int r = 0; r < nf; ++r) {
        dense.block<3, 1>(3 * r, 3 * c + k) = out[free_verts[r]];
      }
      basis[free_verts[c]][k] = 0.0;
    }
  }
  std::vector<Vec3> forces(n, Vec3::Zero());
  add_elastic_forces(s.positions, cs, forces);
  Eigen::VectorXd rhs(3 * nf);
  for (int r = 0; r < nf; ++r) {
    int v = free_verts[r];
    rhs.segment<3>(3 * r) = s.masses[v] * s.velocities[v] + p.dt * forces[v];
  }
  Eigen::VectorXd direct = dense.ldlt().solve(rhs);

  predict(s, m, p);
  solver.step(s);

  double num = 0.0, den = 0.0;
  for (int r = 0; r < nf; ++r) {
    int v = free_verts[r];
    num += (s.velocities[v] - Vec3(direct.segment<3>(3 * r))).squaredNorm();
    den += direct.segment<3>(3 * r).squaredNorm();
  }
  CHECK(std::sqrt(num / den) < 1e-8);
}

TEST_CASE("collisions: sphere projection") {
  auto sphere = make_sphere(Vec3(0, 0, 0), 0.5, 0.0);
  std::vector<Vec3> pos = {Vec3(0.49, 0, 0)};
  std::vector<Vec3> vel = {Vec3::Zero()};
  resolve_collisions(pos, vel, {sphere});
  CHECK(pos[0].norm() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pos[0].x() == doctest::Approx(0.5));
}

TEST_CASE("collisions: vertex above floor untouched") {
  auto floor = make_half_space(Vec3(0, 1, 0), 0.0, 0.5);
  std::vector<Vec3> pos = {Vec3(1, 0.2, 3)};
  std::vector<Vec3> vel = {Vec3(1, -2, 0)};
  resolve_collisions(pos, vel, {floor});
  CHECK(pos[0] == Vec3(1, 0.2, 3));
  CHECK(vel[0] == Vec3(1, -2, 0));
}

TEST_CASE("collisions: floor removes inward normal velocity") {
  auto floor = make_half_space(Vec3(0, 1, 0), 0.0, 0.0);
  std::vector<Vec3> pos = {Vec3(0, -0.1, 0)};
  std::vector<Vec3> vel = {Vec3(1, -2, 0)};
  resolve_collisions(pos, vel, {floor});
  CHECK(pos[0] == Vec3(0, 0, 0));
  CHECK(vel[0] == Vec3(1, 0, 0));
}

TEST_CASE("collisions: friction scales tangential velocity") {
  auto floor = make_half_space(Vec3(0, 1, 0), 0.0, 0.25);
  std::vector<Vec3> pos = {Vec3(0, -0.1, 0)};
  std::vector<Vec3> vel = {Vec3(2, -1, 0)};
  resolve_collisions(pos, vel, {floor});
  CHECK(vel[0].x() == doctest::Approx(1.5));
  CHECK(vel[0].y() == 0.0);
}

TEST_CASE("step_coarse: ballistic free fall recurrence") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0)};
  SolverState s = make_state(m, 1.0);
  SolverParams p;
  p.dt = 0.01;
  CoarseStepper stepper(m, {}, s.masses, p, {}, SolveMethod::Admm);

  Vec3 x = Vec3::Zero(), v = Vec3::Zero();
  for (int step = 0; step < 25; ++step) {
    stepper.step(s);
    v += p.gravity * p.dt;
    x += v * p.dt;
  }
  CHECK(s.positions[0] == x);
  CHECK(s.velocities[0] == v);
}

TEST_CASE("step_coarse: pins are bit-identical over 100 steps") {
  TriMesh m = build_grid_mesh(8, 8, 1.0, 1.0);
  m.pinned = {0, 8};
  std::vector<Constraint> cs = build_constraints(m, 400.0, 4.0);
  SolverState s = make_state(m, 0.5);
  Vec3 pin0 = s.positions[0], pin8 = s.positions[8];
  SolverParams p;
  CoarseStepper stepper(m, cs, s.masses, p, {}, SolveMethod::Admm);
  for (int step = 0; step < 100; ++step) {
    stepper.step(s);
    REQUIRE(s.positions[0] == pin0);
    REQUIRE(s.positions[8] == pin8);
  }
  for (const Vec3& v : s.positions) REQUIRE(v.allFinite());
}

TEST_CASE("ADMM objective never exceeds the prediction objective") {
  TriMesh m = build_grid_mesh(8, 8, 1.0, 1.0);
  m.pinned = {0, 8};
  std::vector<Constraint> cs = build_constraints(m, 500.0, 5.0);
  SolverState s = make_state(m, 0.5);
  SolverParams p;
  CoarseStepper stepper(m, cs, s.masses, p, {}, SolveMethod::Admm);
  for (int step = 0; step < 60; ++step) {
    StepInfo info = stepper.step(s);
    REQUIRE(info.objective_returned <= info.objective_predicted + 1e-12);
  }
}

TEST_CASE("symmetric data stays in its plane for 100 steps") {
  // The vertical sheet with in-plane gravity is mirror-symmetric about its
  // own plane z = 0; nothing may leak out of plane.
  TriMesh m = build_grid_mesh(6, 6, 1.0, 1.0);
  m.pinned = {0, 6};
  std::vector<Constraint> cs = build_constraints(m, 300.0, 2.0);
  SolverState s = make_state(m, 0.5);
  SolverParams p;
  for (SolveMethod method : {SolveMethod::Admm, SolveMethod::Cg}) {
    SolverState run = s;
    CoarseStepper stepper(m, cs, run.masses, p, {}, method);
    for (int step = 0; step < 100; ++step) {
      stepper.step(run);
      for (const Vec3& pos : run.positions) {
        REQUIRE(std::abs(pos.z()) < 1e-6);
      }
    }
  }
}

TEST_CASE("sphere scene: no vertex ends a step inside the sphere") {
  TriMesh m = build_grid_mesh(6, 6, 1.0, 1.0);
  for (Vec3& v : m.vertices) v = Vec3(v.x() - 0.5, 0.45, -v.y() - 0.5);
  std::vector<Constraint> cs = build_constraints(m, 300.0, 2.0);
  SolverState s = make_state(m, 0.5);
  auto sphere = make_sphere(Vec3(0, 0, 0), 0.3, 0.2);
  SolverParams p;
  CoarseStepper stepper(m, cs, s.masses, p, {sphere}, SolveMethod::Admm);
  for (int step = 0; step < 150; ++step) {
    stepper.step(s);
    for (const Vec3& pos : s.positions) {
      REQUIRE(pos.norm() >= 0.3 - 1e-9);
    }
  }
}

TEST_CASE("cold-start mode: deterministic and settles to the same statics") {
  TriMesh m = single_spring_mesh();
  std::vector<Constraint> cs = build_constraints(m, 100.0, 0.0);
  SolverParams p;
  p.warm_start = false;

  auto run = [&] {
    SolverState s = make_state(m, 0.2);
    CoarseStepper stepper(m, cs, s.masses, p, {}, SolveMethod::Admm);
    for (int i = 0; i < 3000; ++i) stepper.step(s);
    return s.positions[1];
  };
  Vec3 a = run();
  Vec3 b = run();
  CHECK(a == b);
  CHECK(std::abs((-1.0 - a.y()) - 0.0098) < 1e-4);
}

TEST_CASE("divergence is reported as a step failure") {
  TriMesh m = single_spring_mesh();
  std::vector<Constraint> cs = build_constraints(m, 100.0, 0.0);
  SolverState s = make_state(m, 0.2);
  s.velocities[1] = Vec3(std::numeric_limits<double>::quiet_NaN(), 0, 0);
  SolverParams p;
  CoarseStepper stepper(m, cs, s.masses, p, {}, SolveMethod::Admm);
  CHECK_THROWS_AS(stepper.step(s), Error);
}
