#include "core/solver.hpp"

#include <cmath>
#include <limits>

namespace hcs {

namespace {

bool all_finite(const std::vector<Vec3>& v) {
  for (const Vec3& p : v) {
    if (!p.allFinite()) return false;
  }
  return true;
}

std::vector<int> build_free_index(const TriMesh& mesh, std::vector<int>& free_verts,
                                  std::vector<int>* pinned_verts) {
  std::vector<int> index(static_cast<size_t>(mesh.vertex_count()), -1);
  free_verts.clear();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_pinned(v)) {
      if (pinned_verts) pinned_verts->push_back(v);
    } else {
      index[static_cast<size_t>(v)] = static_cast<int>(free_verts.size());
      free_verts.push_back(v);
    }
  }
  return index;
}

}  // namespace

SolverState make_state(const TriMesh& mesh, double total_mass) {
  if (total_mass <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "total mass must be > 0");
  }
  SolverState state;
  state.positions = mesh.vertices;
  state.velocities.assign(mesh.vertices.size(), Vec3::Zero());
  state.predicted = mesh.vertices;
  state.masses = Eigen::VectorXd::Constant(
      mesh.vertex_count(), total_mass / mesh.vertex_count());
  return state;
}

void predict(SolverState& state, const TriMesh& mesh, const SolverParams& params) {
  const double dt = params.dt;
  for (size_t i = 0; i < state.positions.size(); ++i) {
    if (mesh.is_pinned(static_cast<int>(i))) {
      state.velocities[i].setZero();
      state.predicted[i] = state.positions[i];
    } else {
      state.velocities[i] += params.gravity * dt;
      state.predicted[i] = state.positions[i] + state.velocities[i] * dt;
    }
  }
}

double step_objective(const std::vector<Vec3>& positions,
                      const std::vector<Constraint>& constraints,
                      const std::vector<Vec3>& predicted,
                      const Eigen::VectorXd& masses, double dt) {
  double inertia = 0.0;
  for (size_t i = 0; i < positions.size(); ++i) {
    inertia += masses[static_cast<Eigen::Index>(i)] *
               (positions[i] - predicted[i]).squaredNorm();
  }
  return inertia / (2.0 * dt * dt) + constraint_energy(positions, constraints);
}

void step_objective_gradient(const std::vector<Vec3>& positions,
                             const std::vector<Constraint>& constraints,
                             const std::vector<Vec3>& predicted,
                             const Eigen::VectorXd& masses, double dt,
                             std::vector<Vec3>& grad) {
  grad.assign(positions.size(), Vec3::Zero());
  const double inv_dt2 = 1.0 / (dt * dt);
  for (size_t i = 0; i < positions.size(); ++i) {
    grad[i] = masses[static_cast<Eigen::Index>(i)] * inv_dt2 *
              (positions[i] - predicted[i]);
  }
  // grad U = -(elastic forces)
  std::vector<Vec3> forces(positions.size(), Vec3::Zero());
  add_elastic_forces(positions, constraints, forces);
  for (size_t i = 0; i < positions.size(); ++i) grad[i] -= forces[i];
}

// ---------------------------------------------------------------------------
// ADMM

AdmmSolver::AdmmSolver(const TriMesh& mesh, std::vector<Constraint> constraints,
                       const Eigen::VectorXd& masses, const SolverParams& params)
    : constraints_(std::move(constraints)),
      dt_(params.dt),
      iterations_(params.admm_iterations),
      warm_start_(params.warm_start) {
  if (params.dt <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  }
  if (params.admm_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "admm_iterations must be >= 1");
  }
  free_index_ = build_free_index(mesh, free_verts_, &pinned_verts_);
  assemble_system(masses);
}

void AdmmSolver::assemble_system(const Eigen::VectorXd& masses) {
  const int nf = static_cast<int>(free_verts_.size());
  mass_over_dt2_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    mass_over_dt2_[f] = masses[free_verts_[static_cast<size_t>(f)]] / (dt_ * dt_);
  }
  if (nf == 0) return;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(nf) + constraints_.size() * 4);
  for (int f = 0; f < nf; ++f) {
    triplets.emplace_back(f, f, mass_over_dt2_[f]);
  }
  for (const Constraint& c : constraints_) {
    int fa = free_index_[static_cast<size_t>(c.a)];
    int fb = free_index_[static_cast<size_t>(c.b)];
    if (fa >= 0) triplets.emplace_back(fa, fa, c.weight2);
    if (fb >= 0) triplets.emplace_back(fb, fb, c.weight2);
    if (fa >= 0 && fb >= 0) {
      triplets.emplace_back(fa, fb, -c.weight2);
      triplets.emplace_back(fb, fa, -c.weight2);
    }
  }
  Eigen::SparseMatrix<double> system(nf, nf);
  system.setFromTriplets(triplets.begin(), triplets.end());
  factor_.compute(system);
  if (factor_.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument,
                "ADMM global-step matrix factorization failed");
  }
  rhs_.resize(nf, 3);
  solution_.resize(nf, 3);
}

void AdmmSolver::reset_duals() { cold_next_ = true; }

StepInfo AdmmSolver::step(SolverState& state) {
  const int nf = static_cast<int>(free_verts_.size());
  StepInfo info;
  info.objective_predicted = step_objective(state.predicted, constraints_,
                                            state.predicted, state.masses, dt_);

  if (constraints_.empty() || nf == 0) {
    // Pure inertia term: minimized exactly at x_tilde.
    state.positions = state.predicted;
    info.objective_returned = info.objective_predicted;
    if (!all_finite(state.positions)) {
      throw Error(ErrorCode::Diverged, "ADMM step produced non-finite positions");
    }
    return info;
  }

  const std::vector<Vec3> old_positions = state.positions;
  std::vector<Vec3> x = state.predicted;

  if (cold_next_ || !warm_start_) {
    for (Constraint& c : constraints_) {
      c.z = x[c.a] - x[c.b];
      c.u.setZero();
    }
    cold_next_ = false;
  }

  std::vector<Vec3> best = x;
  double best_obj = info.objective_predicted;

  for (int it = 0; it < iterations_; ++it) {
    // (a) local projections
    for (Constraint& c : constraints_) {
      Vec3 p = (x[c.a] - x[c.b]) + c.u;
      double len = p.norm();
      if (len > 0.0) {
        double target = (c.stiffness * c.rest + c.weight2 * len) /
                        (c.stiffness + c.weight2);
        c.z = (target / len) * p;
      } else {
        c.z = p;  // degenerate direction
      }
    }

    // (b) global solve
    for (int f = 0; f < nf; ++f) {
      rhs_.row(f) = mass_over_dt2_[f] *
                    state.predicted[free_verts_[static_cast<size_t>(f)]].transpose();
    }
    for (const Constraint& c : constraints_) {
      int fa = free_index_[static_cast<size_t>(c.a)];
      int fb = free_index_[static_cast<size_t>(c.b)];
      Vec3 y = c.z - c.u;
      if (fa >= 0) {
        Vec3 r = fb >= 0 ? y : Vec3(y + x[c.b]);
        rhs_.row(fa) += c.weight2 * r.transpose();
      }
      if (fb >= 0) {
        Vec3 r = fa >= 0 ? Vec3(-y) : Vec3(x[c.a] - y);
        rhs_.row(fb) += c.weight2 * r.transpose();
      }
    }
    solution_ = factor_.solve(rhs_);
    if (!solution_.allFinite()) {
      throw Error(ErrorCode::Diverged, "ADMM global solve produced non-finite positions");
    }
    for (int f = 0; f < nf; ++f) {
      x[free_verts_[static_cast<size_t>(f)]] = solution_.row(f).transpose();
    }

    // (c) dual update
    for (Constraint& c : constraints_) {
      c.u += (x[c.a] - x[c.b]) - c.z;
    }

    double obj = step_objective(x, constraints_, state.predicted, state.masses, dt_);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }

  for (int v : free_verts_) {
    state.velocities[static_cast<size_t>(v)] =
        (best[static_cast<size_t>(v)] - old_positions[static_cast<size_t>(v)]) / dt_;
  }
  state.positions = std::move(best);
  info.objective_returned = best_obj;
  if (!all_finite(state.positions)) {
    throw Error(ErrorCode::Diverged, "ADMM step produced non-finite positions");
  }
  return info;
}

// ---------------------------------------------------------------------------
// CG baseline

CgSolver::CgSolver(const TriMesh& mesh, std::vector<Constraint> constraints,
                   const Eigen::VectorXd& masses, const SolverParams& params)
    : constraints_(std::move(constraints)),
      masses_(masses),
      dt_(params.dt),
      max_iterations_(params.cg_iterations),
      tolerance_(params.cg_tolerance) {
  if (params.dt <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  }
  if (params.cg_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "cg_iterations must be >= 1");
  }
  free_index_ = build_free_index(mesh, free_verts_, nullptr);
}

void CgSolver::apply_system(const std::vector<Vec3>& positions,
                            const std::vector<Vec3>& p,
                            std::vector<Vec3>& y) const {
  y.assign(p.size(), Vec3::Zero());
  for (int v : free_verts_) {
    y[static_cast<size_t>(v)] = masses_[v] * p[static_cast<size_t>(v)];
  }
  const double dt2 = dt_ * dt_;
  for (const Constraint& c : constraints_) {
    int fa = free_index_[static_cast<size_t>(c.a)];
    int fb = free_index_[static_cast<size_t>(c.b)];
    if (fa < 0 && fb < 0) continue;
    Vec3 d = positions[c.a] - positions[c.b];
    double len = d.norm();
    if (len <= 0.0) continue;
    Vec3 dir = d / len;
    // PSD-clamped spring Hessian: k (dir dir^T + beta (I - dir dir^T)).
    double beta = std::max(0.0, 1.0 - c.rest / len);
    Vec3 q = (fa >= 0 ? p[c.a] : Vec3::Zero()) - (fb >= 0 ? p[c.b] : Vec3::Zero());
    double qn = dir.dot(q);
    Vec3 hq = c.stiffness * (qn * dir + beta * (q - qn * dir));
    if (fa >= 0) y[c.a] += dt2 * hq;
    if (fb >= 0) y[c.b] -= dt2 * hq;
  }
}

StepInfo CgSolver::step(SolverState& state) {
  StepInfo info;
  info.objective_predicted = step_objective(state.predicted, constraints_,
                                            state.predicted, state.masses, dt_);
  last_iterations_ = 0;

  if (constraints_.empty() || free_verts_.empty()) {
    state.positions = state.predicted;
    info.objective_returned = info.objective_predicted;
    return info;
  }

  const size_t n = state.positions.size();
  const std::vector<Vec3>& x = state.positions;

  std::vector<Vec3> b(n, Vec3::Zero());
  add_elastic_forces(x, constraints_, b);
  for (int v : free_verts_) {
    size_t i = static_cast<size_t>(v);
    b[i] = masses_[v] * state.velocities[i] + dt_ * b[i];
  }

  auto dot = [this](const std::vector<Vec3>& u, const std::vector<Vec3>& w) {
    double s = 0.0;
    for (int v : free_verts_) {
      s += u[static_cast<size_t>(v)].dot(w[static_cast<size_t>(v)]);
    }
    return s;
  };

  // Warm start from the current velocities.
  std::vector<Vec3> vel(n, Vec3::Zero());
  for (int v : free_verts_) vel[static_cast<size_t>(v)] = state.velocities[static_cast<size_t>(v)];

  std::vector<Vec3> r(n), p(n), ap(n);
  apply_system(x, vel, ap);
  for (int v : free_verts_) {
    size_t i = static_cast<size_t>(v);
    r[i] = b[i] - ap[i];
  }
  p = r;
  double rr = dot(r, r);
  const double b_norm = std::sqrt(dot(b, b));
  const double stop = tolerance_ * b_norm;

  for (int it = 0; it < max_iterations_; ++it) {
    if (rr == 0.0 || std::sqrt(rr) <= stop) break;
    apply_system(x, p, ap);
    double pap = dot(p, ap);
    if (pap <= 0.0) break;  // numerically indefinite; keep current iterate
    double alpha = rr / pap;
    for (int v : free_verts_) {
      size_t i = static_cast<size_t>(v);
      vel[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr_new = dot(r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (int v : free_verts_) {
      size_t i = static_cast<size_t>(v);
      p[i] = r[i] + beta * p[i];
    }
    ++last_iterations_;
  }

  for (int v : free_verts_) {
    size_t i = static_cast<size_t>(v);
    state.velocities[i] = vel[i];
    state.positions[i] += dt_ * vel[i];
  }
  info.objective_returned = step_objective(state.positions, constraints_,
                                           state.predicted, state.masses, dt_);
  if (!all_finite(state.positions)) {
    throw Error(ErrorCode::Diverged, "CG step produced non-finite positions");
  }
  return info;
}

// ---------------------------------------------------------------------------
// Frame pipeline

CoarseStepper::CoarseStepper(const TriMesh& mesh,
                             std::vector<Constraint> constraints,
                             const Eigen::VectorXd& masses,
                             const SolverParams& params,
                             std::vector<CollisionPrimitive> primitives,
                             SolveMethod method)
    : mesh_(mesh),
      params_(params),
      primitives_(std::move(primitives)),
      method_(method) {
  if (method_ == SolveMethod::Admm) {
    admm_ = std::make_unique<AdmmSolver>(mesh, std::move(constraints), masses, params);
  } else {
    cg_ = std::make_unique<CgSolver>(mesh, std::move(constraints), masses, params);
  }
}

StepInfo CoarseStepper::step(SolverState& state) {
  if (pin_positions_.empty() && !mesh_.pinned.empty()) {
    pin_positions_.reserve(mesh_.pinned.size());
    for (int v : mesh_.pinned) {
      pin_positions_.push_back(state.positions[static_cast<size_t>(v)]);
    }
  }

  predict(state, mesh_, params_);
  StepInfo info = method_ == SolveMethod::Admm ? admm_->step(state) : cg_->step(state);
  if (!primitives_.empty()) {
    resolve_collisions(state.positions, state.velocities, primitives_);
  }
  for (size_t k = 0; k < mesh_.pinned.size(); ++k) {
    size_t v = static_cast<size_t>(mesh_.pinned[k]);
    state.positions[v] = pin_positions_[k];
    state.velocities[v].setZero();
  }
  state.time += params_.dt;
  return info;
}

}  // namespace hcs
