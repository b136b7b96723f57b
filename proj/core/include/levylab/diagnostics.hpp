#ifndef LEVYLAB_DIAGNOSTICS_HPP_
#define LEVYLAB_DIAGNOSTICS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "levylab/entropy.hpp"
#include "levylab/levy.hpp"
#include "levylab/model.hpp"
#include "levylab/solver.hpp"
#include "levylab/test_function.hpp"

namespace levylab {

enum class Status { pass, fail, inconclusive };
std::string to_string(Status s);

// Where the jump paths of a Monte-Carlo batch come from: sampled with
// seed_k = base xor k, or read back for a replay.
struct MonteCarlo {
  std::size_t paths = 1;
  int workers = 1;
  std::function<JumpPath(std::size_t)> source;

  static MonteCarlo sampled(const LevyIntensity& levy, double horizon,
                            std::uint64_t base_seed, std::size_t paths, int workers);
  JumpPath path(std::size_t k) const { return source(k); }
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  double band() const { return 3.0 * std_error; }
  static SampleStats of(std::span<const double> samples);
};

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // positive when the check holds with room to spare
  Status status = Status::pass;
  std::string anchor;  // the estimate being tested
  std::string detail;
};

struct DiagnosticsReport {
  std::vector<Check> checks;
  std::map<std::string, std::string> metadata;
  bool incomplete = false;

  void add(Check c) { checks.push_back(std::move(c)); }
  // fail beats inconclusive beats pass; an incomplete report fails.
  Status overall() const;
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
};

// phi_n(x) = 1 for |x| <= n and (n / |x|)^a beyond, a = d/2 + extra.
class WeightPhiN {
 public:
  WeightPhiN(int n, int dim, double extra = 0.1);
  int index() const { return n_; }
  double exponent() const { return a_; }
  double operator()(const Point& x, int dim) const;

 private:
  int n_;
  double a_;
};

double weighted_l1_distance(const Grid& grid, std::span<const double> u,
                            std::span<const double> v, const WeightPhiN& weight);

// ---------------------------------------------------------------- entropy

// Entropy inequality residual on the piecewise constant interpolant u^dt:
//   R = int int [beta(u) psi_t + nu(u) Lap psi - grad psi . zeta(u)]
//     + martingale + correction - dissipation
//     + int beta(u_0) psi(0) - int beta(u_N) psi(T)
// Time integrals of psi are exact on each step, space uses the midpoint
// rule. The dissipation beta''(u) |grad G(u)|^2 is evaluated on cell faces
// with the divided difference of beta' in place of beta''.
struct EntropyResidual {
  double value = 0.0;
  double bulk = 0.0;  // beta psi_t + nu Lap psi - grad psi . zeta + endpoint terms
  double martingale = 0.0;
  double correction = 0.0;
  double dissipation = 0.0;
};

std::vector<EntropyResidual> entropy_residuals(const ProblemSpec& spec,
                                               const Trajectory& traj,
                                               const JumpPath& path,
                                               const EntropyTriple& triple,
                                               std::span<const TestFunction> psis);
EntropyResidual entropy_residual(const ProblemSpec& spec, const Trajectory& traj,
                                 const JumpPath& path, const EntropyTriple& triple,
                                 const TestFunction& psi);

inline double entropy_tolerance(double constant, double epsilon, double h, double dt) {
  return constant * (epsilon + h + dt);
}

struct CalibrationRun {
  int cells = 0;
  int steps = 0;
  double epsilon = 0.0;
  double worst = 0.0;  // max |R| / (eps + h + dt)
};

// Linear noiseless counterpart of `spec` (same u0, phi = c_phi u, f = 0,
// eta = 0) solved at (M, N, eps), (2M, 2N, eps/2), (4M, 4N, eps/4); the
// constant is the largest |R| / (eps + h + dt) over 5 test functions and
// the given theta values.
struct EntropyCalibration {
  double constant = 0.0;
  std::vector<CalibrationRun> runs;
};
EntropyCalibration calibrate_entropy_constant(const ProblemSpec& spec, const Grid& grid,
                                              int steps, std::span<const double> thetas);

struct EntropyTestReport {
  double tolerance = 0.0;
  double worst = 0.0;  // smallest residual seen
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  Status status = Status::pass;
};
EntropyTestReport entropy_residual_test(const ProblemSpec& spec, const Grid& grid,
                                        int steps, const MonteCarlo& mc,
                                        std::span<const double> thetas, double constant);

// ------------------------------------------------------------- energy

struct EnergyBoundReport {
  double coarse = 0.0;  // sup E||u_n||^2 + eps dt sum E||grad u||^2 + dt sum E||grad G(u)||^2
  double fine = 0.0;    // the same with dt / 2
  double relative_change = 0.0;
  Status status = Status::pass;
};
// Per-step quantity combining the three energy terms for one trajectory.
double energy_functional(const EnergyReport& rep);
EnergyBoundReport energy_bound_test(const ProblemSpec& spec, const Grid& grid, int steps,
                                    const MonteCarlo& mc);

// ---------------------------------------------------------------- rates

struct RatePoint {
  double parameter = 0.0;  // dt or eps
  double error = 0.0;      // Monte-Carlo mean
  double band = 0.0;       // 3 sigma
};

struct RateReport {
  std::string lane;  // "stochastic", "deterministic" or "viscosity"
  std::vector<RatePoint> points;
  std::vector<double> ratios;  // error_{k+1} / error_k
  double slope = 0.0;          // least squares slope of log error vs log parameter
  Status status = Status::inconclusive;
  std::string detail;
};

double least_squares_slope(std::span<const double> x, std::span<const double> y);

// E int_0^T ||u^dt - u^{dt/2}||^2 for every dt = T / N in `steps_list`
// (each N is also solved with 2N steps on the same path).
RateReport cauchy_rate_test(const ProblemSpec& spec, const Grid& grid, const MonteCarlo& mc,
                            std::span<const int> steps_list);
// E ||u_eps - u_{eps/2}||_{L^{3/2}((-L,L)^d x (0,T))} along `eps_list`.
RateReport viscosity_convergence_test(const ProblemSpec& spec, const Grid& grid, int steps,
                                      const MonteCarlo& mc, std::span<const double> eps_list);

// ---------------------------------------------------- contraction, moments

struct ContractionReport {
  std::vector<double> times;
  std::vector<double> distance;  // E int |u - v| phi_n at each step
  double fitted_rate = 0.0;      // smallest C with distance(t) <= e^{Ct} distance(0)
  double refined_rate = 0.0;     // the same with dt / 2
  double same_data_distance = 0.0;  // max_t distance for u0 = v0
  Status status = Status::pass;
  std::string detail;
};
ContractionReport contraction_test(const ProblemSpec& spec, const Grid& grid,
                                   const Field& u0, const Field& v0,
                                   const WeightPhiN& weight, const MonteCarlo& mc, int steps);

struct MomentReport {
  int power = 2;
  std::vector<double> times;
  std::vector<double> moment;  // E int |u_n|^p
  double fitted_rate = 0.0;
  double refined_rate = 0.0;
  double final_rate = 0.0;      // ln(E_N / E_0) / T
  double final_rate_sigma = 0.0;
  double oracle_rate = 0.0;     // closed form when available, NaN otherwise
  Status status = Status::pass;
  std::string detail;
};
// Closed-form growth rate of E|u|^p for spatially constant data under
// periodic boundaries with g constant and sigma linear:
//   K_p = int ((1 + A lambda v)^p - 1 - p A lambda v) m(dz).
// Returns NaN when `spec` is not of that form.
double linear_moment_rate(const ProblemSpec& spec, int p);
MomentReport moment_bound_test(const ProblemSpec& spec, const Grid& grid, int p,
                               const MonteCarlo& mc, int steps);

struct BoundReport {
  double bound = 0.0;
  double tolerance = 0.0;
  double max_abs = 0.0;
  std::size_t violations = 0;
  Status status = Status::pass;
};
inline double max_principle_bound(double M, double M1, double u0_sup) {
  return std::max(M + M1, u0_sup);
}
// Requires eta to vanish for |u| > M; M1 = sup |eta|.
BoundReport max_principle_test(const ProblemSpec& spec, const Grid& grid, double M,
                               const MonteCarlo& mc, int steps);

// Variance of the compensated jump sum over [0, T] at the frozen state u0,
// cell by cell, against T g^2 sigma(u0)^2 int v^2 m(dz).
struct IsometryReport {
  std::size_t cells = 0;
  double worst_z = 0.0;  // max |sample var - predicted| / se
  double predicted = 0.0;  // at the cell where worst_z is attained
  double sample = 0.0;
  Status status = Status::pass;
};
IsometryReport noise_isometry_test(const ProblemSpec& spec, const Grid& grid,
                                   const MonteCarlo& mc);

}  // namespace levylab

#endif  // LEVYLAB_DIAGNOSTICS_HPP_
