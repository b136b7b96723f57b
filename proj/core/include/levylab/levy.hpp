#ifndef LEVYLAB_LEVY_HPP_
#define LEVYLAB_LEVY_HPP_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "levylab/entropy.hpp"
#include "levylab/grid.hpp"
#include "levylab/intensity.hpp"
#include "levylab/model.hpp"
#include "levylab/test_function.hpp"
#include "levylab/trajectory.hpp"

namespace levylab {

struct JumpEvent {
  double time = 0.0;
  Mark mark;
};

// One realization of the Poisson random measure on [0, T] x E. Events are
// sorted by time and do not depend on any time grid, so every
// discretization of the same path sees the same jumps.
class JumpPath {
 public:
  JumpPath(std::vector<JumpEvent> events, std::uint64_t seed, double horizon);
  const std::vector<JumpEvent>& events() const { return events_; }
  std::uint64_t seed() const { return seed_; }
  double horizon() const { return horizon_; }
  // Events with t in [t0, t1); the final window also takes t == T.
  std::span<const JumpEvent> window(double t0, double t1) const;

 private:
  std::vector<JumpEvent> events_;
  std::uint64_t seed_;
  double horizon_;
};

// Per-path seeds: seed_k = base xor k.
inline std::uint64_t path_seed(std::uint64_t base, std::uint64_t k) {
  return base ^ k;
}

JumpPath sample_jump_path(const LevyIntensity& intensity, double horizon,
                          std::uint64_t seed);

// Sum of eta(x, u_n(x); z_j) over jumps in [t0, t1) minus
// (t1 - t0) int_E eta(x, u_n(x); z) m(dz), cell by cell.
Field compensated_increment(const JumpPath& path, const ProblemSpec& spec,
                            const Grid& grid, std::span<const double> u_n,
                            double t0, double t1);

// int_0^1 eta beta'(u + theta eta) dtheta and
// int_0^1 (1 - theta) eta^2 beta''(u + theta eta) dtheta, by 16-point Gauss
// on each piece between the breakpoints of beta''.
double jump_entropy_increment(const EntropyTriple& triple, double u, double eta);
double jump_entropy_correction(const EntropyTriple& triple, double u, double eta);

struct MartingaleParts {
  double jumps = 0.0;        // sum over events
  double compensator = 0.0;  // minus the dt x m(dz) integral
  double correction = 0.0;   // the (1 - theta) eta^2 beta'' term
  double martingale() const { return jumps + compensator; }
};

// Stochastic integral of the entropy inequality along one path, with the
// state frozen at u_n over each step window as in the scheme.
MartingaleParts martingale_parts(const JumpPath& path, const ProblemSpec& spec,
                                 const Trajectory& traj,
                                 const EntropyTriple& triple,
                                 const TestFunction& psi);
double martingale_term(const JumpPath& path, const ProblemSpec& spec,
                       const Trajectory& traj, const EntropyTriple& triple,
                       const TestFunction& psi);

// Paths are grid-free; refinement returns the same events.
JumpPath refine_path(const JumpPath& path, int finer_steps);

// Plain text: one `t y v` line per event, 17 significant digits.
void write_path(std::ostream& out, const JumpPath& path);
JumpPath read_path(std::istream& in, std::uint64_t seed, double horizon);

}  // namespace levylab

#endif  // LEVYLAB_LEVY_HPP_
