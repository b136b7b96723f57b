#include "levylab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "levylab/entropy.hpp"
#include "levylab/errors.hpp"

namespace levylab {

SpatialOperator::SpatialOperator(const ProblemSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid) {
  if (grid.cells_per_axis() < 3) throw Error("the solver needs at least 3 cells per axis");
  if (grid.dim() != spec.dim) throw Error("grid and problem dimensions differ");
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (int side = 0; side < 2; ++side) {
      auto& nb = neighbors_[axis][side];
      nb.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        nb[i] = grid.neighbor(i, axis, side == 0 ? -1 : +1);
      }
    }
  }
}

void SpatialOperator::laplacian(std::span<const double> v, double ghost,
                                std::span<double> out) const {
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  std::fill(out.begin(), out.end(), 0.0);
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const auto& left = neighbors_[axis][0];
    const auto& right = neighbors_[axis][1];
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double vl = left[i] < 0 ? ghost : v[left[i]];
      const double vr = right[i] < 0 ? ghost : v[right[i]];
      out[i] += (vl - 2.0 * v[i] + vr) * inv_h2;
    }
  }
}

void SpatialOperator::flux_divergence(std::span<const double> u,
                                      std::span<double> out) const {
  const double h = grid_.spacing();
  const Flux& f = spec_.flux;
  std::fill(out.begin(), out.end(), 0.0);
  if (f.kind() == Flux::Kind::zero) return;
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const auto& left = neighbors_[axis][0];
    const auto& right = neighbors_[axis][1];
    if (spec_.monotone_flux) {
      // Engquist-Osher: the ghost state is u = 0, where plus = minus = 0.
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double ml = left[i] < 0 ? 0.0 : f.minus(u[left[i]], axis);
        const double pr = right[i] < 0 ? 0.0 : f.plus(u[right[i]], axis);
        out[i] += (f.minus(u[i], axis) + pr - ml - f.plus(u[i], axis)) / h;
      }
    } else {
      const double f0 = f.value(0.0, axis);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double fl = left[i] < 0 ? f0 : f.value(u[left[i]], axis);
        const double fr = right[i] < 0 ? f0 : f.value(u[right[i]], axis);
        out[i] += (fr - fl) / (2.0 * h);
      }
    }
  }
}

void SpatialOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = u.size();
  std::vector<double> phi_u(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) phi_u[i] = spec_.phi.value(u[i]);
  laplacian(phi_u, spec_.phi.value(0.0), out);
  if (spec_.epsilon != 0.0) {
    laplacian(u, 0.0, tmp);
    for (std::size_t i = 0; i < n; ++i) out[i] += spec_.epsilon * tmp[i];
  }
  flux_divergence(u, tmp);
  for (std::size_t i = 0; i < n; ++i) out[i] += tmp[i];
}

void SpatialOperator::jacobian(std::span<const double> u, double scale,
                               std::vector<MatrixEntry>& out) const {
  const double h = grid_.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const Flux& f = spec_.flux;
  const bool has_flux = f.kind() != Flux::Kind::zero;
  std::vector<double> diffusion(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    diffusion[i] = spec_.phi.derivative(u[i]) + spec_.epsilon;
  }
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const auto& left = neighbors_[axis][0];
    const auto& right = neighbors_[axis][1];
    for (std::size_t i = 0; i < u.size(); ++i) {
      const long row = static_cast<long>(i);
      double diag = -2.0 * diffusion[i] * inv_h2;
      double lower = 0.0, upper = 0.0;
      if (left[i] >= 0) lower += diffusion[left[i]] * inv_h2;
      if (right[i] >= 0) upper += diffusion[right[i]] * inv_h2;
      if (has_flux) {
        if (spec_.monotone_flux) {
          diag -= std::abs(f.derivative(u[i], axis)) / h;
          if (left[i] >= 0) lower -= std::min(f.derivative(u[left[i]], axis), 0.0) / h;
          if (right[i] >= 0) upper += std::max(f.derivative(u[right[i]], axis), 0.0) / h;
        } else {
          if (left[i] >= 0) lower -= f.derivative(u[left[i]], axis) / (2.0 * h);
          if (right[i] >= 0) upper += f.derivative(u[right[i]], axis) / (2.0 * h);
        }
      }
      out.push_back({row, row, scale * diag});
      if (left[i] >= 0) out.push_back({row, left[i], scale * lower});
      if (right[i] >= 0) out.push_back({row, right[i], scale * upper});
    }
  }
}

void SpatialOperator::laplacian_matrix(double scale, std::vector<MatrixEntry>& out) const {
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const long row = static_cast<long>(i);
      out.push_back({row, row, -2.0 * scale * inv_h2});
      for (int side = 0; side < 2; ++side) {
        const long nb = neighbors_[axis][side][i];
        if (nb >= 0) out.push_back({row, nb, scale * inv_h2});
      }
    }
  }
}

namespace {

// Solves the linear systems of one step: a (cyclic) tridiagonal solve in one
// dimension, sparse LU in two.
class LinearSystem {
 public:
  explicit LinearSystem(const Grid& grid)
      : n_(static_cast<long>(grid.size())), one_d_(grid.dim() == 1) {
    if (one_d_) {
      lower_.resize(n_);
      diag_.resize(n_);
      upper_.resize(n_);
    }
  }

  // Matrix = I + sum of entries.
  void assemble(const std::vector<MatrixEntry>& entries) {
    if (one_d_) {
      std::fill(lower_.begin(), lower_.end(), 0.0);
      std::fill(diag_.begin(), diag_.end(), 1.0);
      std::fill(upper_.begin(), upper_.end(), 0.0);
      for (const auto& e : entries) {
        if (e.col == e.row) {
          diag_[e.row] += e.value;
        } else if (e.col == (e.row + 1) % n_) {
          upper_[e.row] += e.value;
        } else {
          lower_[e.row] += e.value;
        }
      }
      cyclic_ = lower_[0] != 0.0 || upper_[n_ - 1] != 0.0;
      return;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(entries.size() + n_);
    for (long i = 0; i < n_; ++i) triplets.emplace_back(i, i, 1.0);
    for (const auto& e : entries) triplets.emplace_back(e.row, e.col, e.value);
    matrix_.resize(n_, n_);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();
    if (!analyzed_) {
      lu_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success) throw Error("sparse LU factorization failed");
  }

  void solve(std::span<const double> rhs, std::span<double> x) {
    if (one_d_) {
      if (cyclic_) {
        solve_cyclic(rhs, x);
      } else {
        thomas(diag_, rhs, x);
      }
      return;
    }
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
    Eigen::VectorXd sol = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw Error("sparse LU solve failed");
    std::copy(sol.data(), sol.data() + n_, x.begin());
  }

 private:
  // Tridiagonal solve with the given main diagonal (corners ignored).
  void thomas(const std::vector<double>& diag, std::span<const double> rhs,
              std::span<double> x) {
    scratch_.resize(n_);
    double beta = diag[0];
    if (beta == 0.0) throw Error("singular tridiagonal system");
    x[0] = rhs[0] / beta;
    for (long i = 1; i < n_; ++i) {
      scratch_[i] = upper_[i - 1] / beta;
      beta = diag[i] - lower_[i] * scratch_[i];
      if (beta == 0.0) throw Error("singular tridiagonal system");
      x[i] = (rhs[i] - lower_[i] * x[i - 1]) / beta;
    }
    for (long i = n_ - 2; i >= 0; --i) x[i] -= scratch_[i + 1] * x[i + 1];
  }

  // Periodic corners by Sherman-Morrison.
  void solve_cyclic(std::span<const double> rhs, std::span<double> x) {
    const double alpha = upper_[n_ - 1];  // row n-1, column 0
    const double beta = lower_[0];        // row 0, column n-1
    const double gamma = -diag_[0];
    std::vector<double> bb = diag_;
    bb[0] = diag_[0] - gamma;
    bb[n_ - 1] = diag_[n_ - 1] - alpha * beta / gamma;
    thomas(bb, rhs, x);
    std::vector<double> u(n_, 0.0), z(n_);
    u[0] = gamma;
    u[n_ - 1] = alpha;
    thomas(bb, u, z);
    const double fact = (x[0] + beta * x[n_ - 1] / gamma) /
                        (1.0 + z[0] + beta * z[n_ - 1] / gamma);
    for (long i = 0; i < n_; ++i) x[i] -= fact * z[i];
  }

  long n_;
  bool one_d_;
  bool cyclic_ = false;
  std::vector<double> lower_, diag_, upper_, scratch_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool analyzed_ = false;
};

double discrete_l2(const Grid& grid, std::span<const double> v) {
  return std::sqrt(l2_norm_squared(grid, v));
}

}  // namespace

Field implicit_step(const ProblemSpec& spec, const Grid& grid,
                    std::span<const double> u_n,
                    std::span<const double> noise_inc, double dt,
                    StepStats* stats, const SolverOptions& options) {
  if (u_n.size() != grid.size() || noise_inc.size() != grid.size()) {
    throw Error("state does not match grid");
  }
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const std::size_t n = grid.size();
  const SpatialOperator op(spec, grid);
  const double tol = options.rel_tol * (1.0 + discrete_l2(grid, u_n));
  Field x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = u_n[i] + noise_inc[i];

  Field a(n);
  auto residual = [&](std::span<const double> u, std::span<double> r) {
    op.apply(u, a);
    for (std::size_t i = 0; i < n; ++i) r[i] = u[i] - x[i] - dt * a[i];
    return discrete_l2(grid, r);
  };

  std::vector<double> history;
  StepStats local;
  local.tolerance = tol;
  Field u = x, r(n), delta(n), trial(n), trial_r(n), rhs(n);
  double norm = residual(u, r);
  history.push_back(norm);
  LinearSystem system(grid);
  std::vector<MatrixEntry> entries;

  // Damped Newton with Armijo backtracking.
  bool converged = norm <= tol;
  Field best = u;
  double best_norm = norm;
  for (int it = 0; !converged && it < options.max_newton; ++it) {
    entries.clear();
    op.jacobian(u, -dt, entries);
    system.assemble(entries);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    system.solve(rhs, delta);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1.0 / 4096.0) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * delta[i];
      const double trial_norm = residual(trial, trial_r);
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * lambda) * norm) {
        u.swap(trial);
        r.swap(trial_r);
        norm = trial_norm;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    ++local.newton_iterations;
    history.push_back(norm);
    if (norm < best_norm) {
      best = u;
      best_norm = norm;
    }
    converged = norm <= tol;
    if (!accepted) break;
  }

  // L-scheme: (I - dt (eps + L) Lap_h) u+ = X + dt [Lap_h (phi(u) - L u) + D_h f(u)]
  // with L >= c_phi, monotone in u.
  if (!converged) {
    u = best;
    norm = residual(u, r);
    const double L = std::max(spec.phi.lipschitz(), 1e-12);
    entries.clear();
    op.laplacian_matrix(-dt * (spec.epsilon + L), entries);
    system.assemble(entries);
    Field shifted(n), lap(n), div(n);
    for (int it = 0; it < options.max_picard && !converged; ++it) {
      for (std::size_t i = 0; i < n; ++i) shifted[i] = spec.phi.value(u[i]) - L * u[i];
      op.laplacian(shifted, spec.phi.value(0.0), lap);
      op.flux_divergence(u, div);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] + dt * (lap[i] + div[i]);
      system.solve(rhs, u);
      norm = residual(u, r);
      ++local.picard_iterations;
      if (it % 50 == 0) history.push_back(norm);
      converged = norm <= tol;
      if (!std::isfinite(norm)) break;
    }
    history.push_back(norm);
  }
  local.residual = norm;
  if (stats) *stats = local;
  if (!converged) {
    throw StepFailure(-1, std::move(history),
                      "nonlinear solve did not reach tolerance " + std::to_string(tol) +
                          " (residual " + std::to_string(norm) + ")");
  }
  return u;
}

Trajectory solve_path(const ProblemSpec& spec, const Grid& grid, int steps,
                      const JumpPath& path, const SolverOptions& options) {
  return solve_path(spec, grid, steps, path, discretize_initial(spec, grid, spec.margin),
                    options);
}

Trajectory solve_path(const ProblemSpec& spec, const Grid& grid, int steps,
                      const JumpPath& path, Field initial,
                      const SolverOptions& options) {
  if (steps < 1) throw Error("need at least one time step");
  if (initial.size() != grid.size()) throw Error("initial state does not match grid");
  Trajectory traj(grid, spec.horizon / steps, steps);
  traj.states.reserve(steps + 1);
  traj.increments.reserve(steps);
  traj.stats.reserve(steps);
  traj.states.push_back(std::move(initial));
  for (int k = 0; k < steps; ++k) {
    const Field& u = traj.states.back();
    Field inc = compensated_increment(path, spec, grid, u, traj.time(k), traj.time(k + 1));
    StepStats stats;
    Field next;
    try {
      next = implicit_step(spec, grid, u, inc, traj.dt, &stats, options);
    } catch (const StepFailure& e) {
      throw e.at_step(k);
    }
    traj.states.push_back(std::move(next));
    traj.increments.push_back(std::move(inc));
    traj.stats.push_back(stats);
  }
  return traj;
}

Interpolants::Interpolants(const Trajectory& traj) : traj_(&traj) {
  const std::size_t n = traj.grid.size();
  accumulated_.assign(1, Field(n, 0.0));
  for (const auto& inc : traj.increments) {
    Field next = accumulated_.back();
    for (std::size_t i = 0; i < n; ++i) next[i] += inc[i];
    accumulated_.push_back(std::move(next));
  }
}

const Field& Interpolants::piecewise_constant(double t) const {
  if (t < 0.0) return traj_->states.front();
  const long k = static_cast<long>(std::floor(t / traj_->dt)) + 1;
  return traj_->states[std::min<long>(k, traj_->steps)];
}

namespace {

Field lerp_knots(const std::vector<Field>& knots, double dt, int steps, double t) {
  if (t <= 0.0) return knots.front();
  if (t >= steps * dt) return knots.back();
  const int k = std::min(static_cast<int>(std::floor(t / dt)), steps - 1);
  const double s = t / dt - k;
  Field out(knots[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 - s) * knots[k][i] + s * knots[k + 1][i];
  }
  return out;
}

}  // namespace

Field Interpolants::linear(double t) const {
  return lerp_knots(traj_->states, traj_->dt, traj_->steps, t);
}

Field Interpolants::noise(double t) const {
  return lerp_knots(accumulated_, traj_->dt, traj_->steps, t);
}

double Interpolants::gap_squared() const {
  // On each step u^dt - u~^dt = (1 - s)(u_k - u_{k-1}), s in [0, 1).
  return gap_bound() / 3.0;
}

double Interpolants::gap_bound() const {
  const auto& states = traj_->states;
  double sum = 0.0;
  Field d(states.front().size());
  for (int k = 0; k < traj_->steps; ++k) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = states[k + 1][i] - states[k][i];
    sum += l2_norm_squared(traj_->grid, d);
  }
  return traj_->dt * sum;
}

Interpolants build_interpolants(const Trajectory& traj) { return Interpolants(traj); }

Field apply_phi(const Phi& phi, std::span<const double> u) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = phi.value(u[i]);
  return out;
}

Field apply_kirchhoff(const Phi& phi, std::span<const double> u) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = kirchhoff_G(phi, u[i]);
  return out;
}

EnergyReport discrete_energy_report(const Trajectory& traj, const ProblemSpec& spec) {
  const Grid& grid = traj.grid;
  const int steps = traj.steps;
  const double dt = traj.dt;
  const double c_phi = spec.phi.lipschitz();
  EnergyReport rep;
  for (auto* v : {&rep.norm2, &rep.increments, &rep.phi_dissipation, &rep.viscous,
                  &rep.kirchhoff, &rep.noise}) {
    v->assign(steps + 1, 0.0);
  }
  rep.norm2[0] = l2_norm_squared(grid, traj.states[0]);
  Field d(grid.size());
  for (int k = 0; k < steps; ++k) {
    const Field& next = traj.states[k + 1];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = next[i] - traj.states[k][i];
    rep.norm2[k + 1] = l2_norm_squared(grid, next);
    rep.increments[k + 1] = rep.increments[k] + l2_norm_squared(grid, d);
    const double dphi =
        c_phi > 0.0 ? dt / c_phi *
                          gradient_norm_squared(grid, apply_phi(spec.phi, next),
                                                spec.phi.value(0.0))
                    : 0.0;
    rep.phi_dissipation[k + 1] = rep.phi_dissipation[k] + dphi;
    rep.viscous[k + 1] =
        rep.viscous[k] + spec.epsilon * dt * gradient_norm_squared(grid, next, 0.0);
    rep.kirchhoff[k + 1] =
        rep.kirchhoff[k] +
        dt * gradient_norm_squared(grid, apply_kirchhoff(spec.phi, next), 0.0);
    rep.noise[k + 1] = rep.noise[k] + l2_norm_squared(grid, traj.increments[k]);
  }
  rep.c1 = rep.norm2[0] + rep.noise[steps];
  double running = 0.0;
  rep.bounded = true;
  rep.monotone = true;
  for (int n = 0; n <= steps; ++n) {
    const double lhs = rep.lhs(n);
    if (!std::isfinite(lhs)) rep.bounded = false;
    if (lhs > rep.c1 && running > 0.0) rep.c2 = std::max(rep.c2, (lhs - rep.c1) / running);
    if (lhs > rep.c1 * (1.0 + 1e-12) && running == 0.0) rep.bounded = false;
    if (n > 0 && rep.norm2[n] > rep.norm2[n - 1] * (1.0 + 1e-12) + 1e-300) {
      rep.monotone = false;
    }
    running += dt * rep.norm2[n];
  }
  return rep;
}

}  // namespace levylab
