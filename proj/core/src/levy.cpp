#include "levylab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

JumpPath::JumpPath(std::vector<JumpEvent> events, std::uint64_t seed,
                   double horizon)
    : events_(std::move(events)), seed_(seed), horizon_(horizon) {
  std::stable_sort(events_.begin(), events_.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
}

std::span<const JumpEvent> JumpPath::window(double t0, double t1) const {
  if (!(t1 >= t0)) throw Error("invalid noise window");
  auto by_time = [](const JumpEvent& e, double t) { return e.time < t; };
  auto first = std::lower_bound(events_.begin(), events_.end(), t0, by_time);
  // The last window is closed so that an event at exactly T is not lost.
  auto last = t1 >= horizon_ ? events_.end()
                             : std::lower_bound(first, events_.end(), t1, by_time);
  return {first, last};
}

JumpPath sample_jump_path(const LevyIntensity& intensity, double horizon,
                          std::uint64_t seed) {
  if (!(horizon > 0.0)) throw Error("path horizon must be positive");
  const double rate = intensity.total_mass();  // throws for untruncated measures
  if (!std::isfinite(rate)) {
    throw TruncationRequired("total intensity is not finite");
  }
  Rng rng(seed);
  std::vector<JumpEvent> events;
  if (rate > 0.0) {
    const auto count = rng.poisson(rate * horizon);
    events.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
      JumpEvent e;
      e.time = horizon * rng.uniform();
      e.mark = intensity.sample_mark(rng);
      events.push_back(e);
    }
  }
  return JumpPath(std::move(events), seed, horizon);
}

namespace {

// int eta m(dz) / (g sigma) for the separable amplitude eta = g(x) sigma(u) v.
double compensator_first_moment(const LevyIntensity& levy) {
  double m1 = 0.0;
  for (const auto& node : levy.nodes()) m1 += node.weight * node.mark.size;
  return m1 + levy.small_jump_first_moment();
}

// Splits [0, 1] where u + theta eta crosses a breakpoint of beta''.
template <class F>
double theta_integral(const EntropyTriple& triple, double u, double eta, const F& f) {
  double cuts[8];
  int n = 0;
  for (double p : triple.breakpoints()) {
    const double theta = (p - u) / eta;
    if (theta > 0.0 && theta < 1.0 && n < 8) cuts[n++] = theta;
  }
  std::sort(cuts, cuts + n);
  return GaussLegendre16::integrate_piecewise(f, 0.0, 1.0, {cuts, cuts + n});
}

}  // namespace

Field compensated_increment(const JumpPath& path, const ProblemSpec& spec,
                            const Grid& grid, std::span<const double> u_n,
                            double t0, double t1) {
  if (u_n.size() != grid.size()) throw Error("state does not match grid");
  Field inc(grid.size(), 0.0);
  if (spec.eta.is_zero()) return inc;
  const auto events = path.window(t0, t1);
  double jumps = 0.0;
  for (const auto& e : events) jumps += e.mark.size;
  const double drift = (t1 - t0) * compensator_first_moment(spec.levy);
  for (std::size_t i = 0; i < inc.size(); ++i) {
    const double gs = spec.eta.spatial(grid.center(i), grid.dim()) * spec.eta.state(u_n[i]);
    inc[i] = gs * (jumps - drift);
  }
  return inc;
}

double jump_entropy_increment(const EntropyTriple& triple, double u, double eta) {
  if (eta == 0.0) return 0.0;
  return eta * theta_integral(triple, u, eta, [&](double theta) {
           return triple.beta_prime(u + theta * eta);
         });
}

double jump_entropy_correction(const EntropyTriple& triple, double u, double eta) {
  if (eta == 0.0) return 0.0;
  return eta * eta * theta_integral(triple, u, eta, [&](double theta) {
           return (1.0 - theta) * triple.beta_second(u + theta * eta);
         });
}

MartingaleParts martingale_parts(const JumpPath& path, const ProblemSpec& spec,
                                 const Trajectory& traj,
                                 const EntropyTriple& triple,
                                 const TestFunction& psi) {
  MartingaleParts parts;
  if (spec.eta.is_zero()) return parts;
  const Grid& grid = traj.grid;
  const int dim = grid.dim();
  const double vol = grid.cell_volume();
  std::vector<Point> x(grid.size());
  std::vector<double> b(grid.size()), g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    x[i] = grid.center(i);
    b[i] = psi.space().value(x[i], dim);
    g[i] = spec.eta.spatial(x[i], dim);
  }
  const auto nodes = spec.levy.nodes();
  for (int n = 0; n < traj.steps; ++n) {
    const Field& u = traj.states[n];
    const double t0 = traj.time(n), t1 = traj.time(n + 1);
    // The scheme applies every jump of the window at t0, which is also where
    // the piecewise constant interpolant changes value; weight them there.
    const double a = psi.time().value(t0);
    for (const auto& e : path.window(t0, t1)) {
      if (a == 0.0) break;
      double sum = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (b[i] == 0.0) continue;
        const double eta = g[i] * spec.eta.state(u[i]) * e.mark.size;
        sum += b[i] * jump_entropy_increment(triple, u[i], eta);
      }
      parts.jumps += a * vol * sum;
    }
    const double weight = psi.time().primitive(t1) - psi.time().primitive(t0);
    if (weight == 0.0) continue;
    double comp = 0.0, corr = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (b[i] == 0.0) continue;
      const double gs = g[i] * spec.eta.state(u[i]);
      if (gs == 0.0) continue;
      double ci = 0.0, ki = 0.0;
      for (const auto& node : nodes) {
        const double eta = gs * node.mark.size;
        ci += node.weight * jump_entropy_increment(triple, u[i], eta);
        ki += node.weight * jump_entropy_correction(triple, u[i], eta);
      }
      // Truncated small jumps enter through their first moment only.
      ci += gs * spec.levy.small_jump_first_moment() * triple.beta_prime(u[i]);
      comp += b[i] * ci;
      corr += b[i] * ki;
    }
    parts.compensator -= weight * vol * comp;
    parts.correction += weight * vol * corr;
  }
  return parts;
}

double martingale_term(const JumpPath& path, const ProblemSpec& spec,
                       const Trajectory& traj, const EntropyTriple& triple,
                       const TestFunction& psi) {
  return martingale_parts(path, spec, traj, triple, psi).martingale();
}

JumpPath refine_path(const JumpPath& path, int finer_steps) {
  if (finer_steps < 1) throw Error("refined grid needs at least one step");
  return path;
}

void write_path(std::ostream& out, const JumpPath& path) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& e : path.events()) {
    buf << e.time << ' ' << e.mark.position << ' ' << e.mark.size << '\n';
  }
  out << buf.str();
}

JumpPath read_path(std::istream& in, std::uint64_t seed, double horizon) {
  std::vector<JumpEvent> events;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    JumpEvent e;
    if (!(row >> e.time >> e.mark.position >> e.mark.size)) {
      throw Error("malformed path line " + std::to_string(lineno));
    }
    if (e.time < 0.0 || e.time > horizon) {
      throw Error("path event outside [0, T] on line " + std::to_string(lineno));
    }
    events.push_back(e);
  }
  return JumpPath(std::move(events), seed, horizon);
}

}  // namespace levylab
