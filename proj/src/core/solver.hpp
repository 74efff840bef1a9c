#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "core/collision.hpp"
#include "core/constraints.hpp"
#include "core/mesh.hpp"

namespace hcs {

/// Particle state of one simulated mesh level.
struct SolverState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<Vec3> predicted;  // x_tilde scratch, filled by predict()
  Eigen::VectorXd masses;       // per-vertex, kg
  double time = 0.0;
};

struct SolverParams {
  double dt = 1.0 / 150.0;
  Vec3 gravity = Vec3(0.0, -9.8, 0.0);
  int admm_iterations = 20;
  int cg_iterations = 100;
  double cg_tolerance = 0.0;  // relative residual; 0 runs the full budget
  bool warm_start = true;
  int threads = 1;
};

/// State at the mesh rest pose, uniform mass = total_mass / vertex count.
SolverState make_state(const TriMesh& mesh, double total_mass);

/// External acceleration then inertia prediction:
/// v += g*dt, x_tilde = x + v*dt; pinned vertices keep x_tilde = x, v = 0.
void predict(SolverState& state, const TriMesh& mesh, const SolverParams& params);

/// Implicit-step objective (the quantity both solvers approximately minimize):
/// sum_i m_i |x_i - x_tilde_i|^2 / (2 dt^2) + sum_c 1/2 k (|x_a - x_b| - rest)^2.
double step_objective(const std::vector<Vec3>& positions,
                      const std::vector<Constraint>& constraints,
                      const std::vector<Vec3>& predicted,
                      const Eigen::VectorXd& masses, double dt);

/// Gradient of step_objective. `grad` is resized and overwritten.
void step_objective_gradient(const std::vector<Vec3>& positions,
                             const std::vector<Constraint>& constraints,
                             const std::vector<Vec3>& predicted,
                             const Eigen::VectorXd& masses, double dt,
                             std::vector<Vec3>& grad);

struct StepInfo {
  double objective_predicted = 0.0;  // at x_tilde
  double objective_returned = 0.0;   // at the returned positions
};

/// Projective-dynamics ADMM solver for one mesh level. The global-step matrix
/// over free vertices is assembled and factorized once at construction
/// (topology, masses, stiffnesses and dt are fixed for the scene's lifetime).
///
/// Each call to step() runs `admm_iterations` rounds of
///   (a) per-constraint local projection of z against the dual u,
///   (b) global linear solve of the inertia + coupling quadratic,
///   (c) dual update u += Dx - z,
/// then returns the iterate with the lowest step objective (x_tilde included),
/// so objective_returned <= objective_predicted always holds.
class AdmmSolver {
 public:
  AdmmSolver(const TriMesh& mesh, std::vector<Constraint> constraints,
             const Eigen::VectorXd& masses, const SolverParams& params);

  /// Advances positions/velocities from state.predicted. Throws
  /// ErrorCode::Diverged on non-finite results.
  StepInfo step(SolverState& state);

  /// Cold start: z reset from current rest-direction values, u zeroed.
  void reset_duals();

  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  void assemble_system(const Eigen::VectorXd& masses);

  std::vector<Constraint> constraints_;
  std::vector<int> free_index_;  // vertex -> row in the reduced system, -1 if pinned
  std::vector<int> free_verts_;
  std::vector<int> pinned_verts_;
  double dt_;
  int iterations_;
  bool warm_start_;
  bool cold_next_ = true;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
  Eigen::VectorXd mass_over_dt2_;               // per free vertex
  Eigen::Matrix<double, Eigen::Dynamic, 3> rhs_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> solution_;
};

/// Baseline: one linearized implicit-Euler solve (elastic forces linearized at
/// the current positions) with hand-rolled conjugate gradient, matrix-free.
/// Spring Hessians use the standard positive-semidefinite clamp so the system
/// stays CG-solvable under compression.
class CgSolver {
 public:
  CgSolver(const TriMesh& mesh, std::vector<Constraint> constraints,
           const Eigen::VectorXd& masses, const SolverParams& params);

  StepInfo step(SolverState& state);

  const std::vector<Constraint>& constraints() const { return constraints_; }
  int last_iterations() const { return last_iterations_; }

  /// System operator y = (M + dt^2 H(x)) p over free vertices (pinned rows and
  /// columns dropped). Exposed so tests can cross-check CG against a direct
  /// dense solve of the same system.
  void apply_system(const std::vector<Vec3>& positions,
                    const std::vector<Vec3>& p, std::vector<Vec3>& y) const;
  const std::vector<int>& free_vertices() const { return free_verts_; }

 private:
  std::vector<Constraint> constraints_;
  std::vector<int> free_index_;
  std::vector<int> free_verts_;
  Eigen::VectorXd masses_;
  double dt_;
  int max_iterations_;
  double tolerance_;
  int last_iterations_ = 0;
};

/// One full coarse-level frame: predict -> chosen solve -> collisions ->
/// pin enforcement; advances state.time by dt.
enum class SolveMethod { Admm, Cg };

class CoarseStepper {
 public:
  CoarseStepper(const TriMesh& mesh, std::vector<Constraint> constraints,
                const Eigen::VectorXd& masses, const SolverParams& params,
                std::vector<CollisionPrimitive> primitives, SolveMethod method);

  StepInfo step(SolverState& state);

  SolveMethod method() const { return method_; }

 private:
  const TriMesh& mesh_;
  SolverParams params_;
  std::vector<CollisionPrimitive> primitives_;
  SolveMethod method_;
  std::unique_ptr<AdmmSolver> admm_;
  std::unique_ptr<CgSolver> cg_;
  std::vector<Vec3> pin_positions_;
};

}  // namespace hcs
