#ifndef LEVYLAB_SOLVER_HPP_
#define LEVYLAB_SOLVER_HPP_

#include <memory>
#include <span>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/levy.hpp"
#include "levylab/model.hpp"
#include "levylab/trajectory.hpp"

namespace levylab {

struct SolverOptions {
  int max_newton = 50;
  int max_picard = 5000;
  // Step tolerance is rel_tol (1 + ||u_n||_2).
  double rel_tol = 1e-10;
};

struct MatrixEntry {
  long row;
  long col;
  double value;
};

// A(u) = Lap_h phi(u) + eps Lap_h u + D_h . f(u) on cell centers. Dirichlet
// ghosts hold u = 0.
class SpatialOperator {
 public:
  SpatialOperator(const ProblemSpec& spec, const Grid& grid);
  void apply(std::span<const double> u, std::span<double> out) const;
  // Entries of dA/du, scaled by `scale`, appended to `out`.
  void jacobian(std::span<const double> u, double scale,
                std::vector<MatrixEntry>& out) const;
  // Entries of scale * Lap_h appended to `out`.
  void laplacian_matrix(double scale, std::vector<MatrixEntry>& out) const;
  void laplacian(std::span<const double> v, double ghost, std::span<double> out) const;
  void flux_divergence(std::span<const double> u, std::span<double> out) const;

  const Grid& grid() const { return grid_; }
  const ProblemSpec& spec() const { return spec_; }

 private:
  ProblemSpec spec_;
  Grid grid_;
  // neighbors_[axis][0] = left, [1] = right; -1 marks a Dirichlet ghost.
  std::vector<long> neighbors_[2][2];
};

// One implicit Euler step: find u with
//   u - X - dt (Lap_h phi(u) + eps Lap_h u + D_h . f(u)) = 0,  X = u_n + noise.
// Damped Newton first, monotone Picard (L-scheme) iteration as fallback.
Field implicit_step(const ProblemSpec& spec, const Grid& grid,
                    std::span<const double> u_n,
                    std::span<const double> noise_inc, double dt,
                    StepStats* stats = nullptr, const SolverOptions& options = {});

Trajectory solve_path(const ProblemSpec& spec, const Grid& grid, int steps,
                      const JumpPath& path, const SolverOptions& options = {});
Trajectory solve_path(const ProblemSpec& spec, const Grid& grid, int steps,
                      const JumpPath& path, Field initial,
                      const SolverOptions& options = {});

// Piecewise constant u^dt, piecewise linear u~^dt and the noise accumulator
// B~^dt built from B_k = sum_{j<k} increments_j.
class Interpolants {
 public:
  explicit Interpolants(const Trajectory& traj);
  // u_k on [(k-1) dt, k dt), u_0 for t < 0 and u_N for t >= T.
  const Field& piecewise_constant(double t) const;
  Field linear(double t) const;
  Field noise(double t) const;
  const Field& noise_knot(int k) const { return accumulated_[k]; }
  // int_0^T ||u^dt - u~^dt||^2 dt, exact for the two interpolants.
  double gap_squared() const;
  // dt sum ||u_{k+1} - u_k||^2.
  double gap_bound() const;

 private:
  const Trajectory* traj_;
  std::vector<Field> accumulated_;
};

Interpolants build_interpolants(const Trajectory& traj);

struct EnergyReport {
  // Indexed by n = 0..N; sums run over k < n.
  std::vector<double> norm2;            // ||u_n||^2
  std::vector<double> increments;       // sum ||u_{k+1} - u_k||^2
  std::vector<double> phi_dissipation;  // (dt / c_phi) sum ||grad phi(u_{k+1})||^2
  std::vector<double> viscous;          // eps dt sum ||grad u_{k+1}||^2
  std::vector<double> kirchhoff;        // dt sum ||grad G(u_{k+1})||^2
  std::vector<double> noise;            // sum ||noise_k||^2
  double c1 = 0.0;  // ||u_0||^2 + sum ||noise_k||^2
  double c2 = 0.0;  // smallest rate with lhs_n <= c1 + c2 dt sum_{k<n} ||u_k||^2
  bool bounded = false;
  bool monotone = false;  // ||u_n|| non-increasing
  double lhs(std::size_t n) const {
    return norm2[n] + increments[n] + phi_dissipation[n] + viscous[n] + kirchhoff[n];
  }
};

EnergyReport discrete_energy_report(const Trajectory& traj, const ProblemSpec& spec);

// Apply phi or G cellwise.
Field apply_phi(const Phi& phi, std::span<const double> u);
Field apply_kirchhoff(const Phi& phi, std::span<const double> u);

}  // namespace levylab

#endif  // LEVYLAB_SOLVER_HPP_
