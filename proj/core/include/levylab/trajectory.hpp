#ifndef LEVYLAB_TRAJECTORY_HPP_
#define LEVYLAB_TRAJECTORY_HPP_

#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

struct StepStats {
  int newton_iterations = 0;
  int picard_iterations = 0;
  double residual = 0.0;
  double tolerance = 0.0;
};

// States u_0..u_N on a uniform time grid t_n = n dt, the noise increments
// that drove each step and the nonlinear solver statistics.
struct Trajectory {
  Trajectory(Grid g, double step, int n) : grid(g), dt(step), steps(n) {}
  Grid grid;
  double dt;
  int steps;
  std::vector<Field> states;
  std::vector<Field> increments;
  std::vector<StepStats> stats;

  double time(int n) const { return n * dt; }
  double horizon() const { return steps * dt; }
};

}  // namespace levylab

#endif  // LEVYLAB_TRAJECTORY_HPP_
