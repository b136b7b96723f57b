#include "levylab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"

namespace levylab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "?";
}

MonteCarlo MonteCarlo::sampled(const LevyIntensity& levy, double horizon,
                               std::uint64_t base_seed, std::size_t paths, int workers) {
  MonteCarlo mc;
  mc.paths = paths;
  mc.workers = workers;
  mc.source = [levy, horizon, base_seed](std::size_t k) {
    return sample_jump_path(levy, horizon, path_seed(base_seed, k));
  };
  return mc;
}

SampleStats SampleStats::of(std::span<const double> samples) {
  SampleStats s;
  s.count = samples.size();
  if (s.count == 0) return s;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (s.count - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

Status DiagnosticsReport::overall() const {
  if (incomplete) return Status::fail;
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.status == Status::fail) return Status::fail;
    if (c.status == Status::inconclusive) inconclusive = true;
  }
  return inconclusive ? Status::inconclusive : Status::pass;
}

void DiagnosticsReport::write_csv(std::ostream& out) const {
  out << "check,value,bound,margin,status,anchor,detail\n";
  for (const auto& c : checks) {
    out << csv_field(c.name) << ',' << fmt17(c.value) << ',' << fmt17(c.bound) << ','
        << fmt17(c.margin) << ',' << to_string(c.status) << ',' << csv_field(c.anchor)
        << ',' << csv_field(c.detail) << '\n';
  }
}

void DiagnosticsReport::write_summary(std::ostream& out) const {
  for (const auto& [key, value] : metadata) out << key << ": " << value << '\n';
  if (incomplete) out << "run incomplete: a step failed, later checks were not run\n";
  for (const auto& c : checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%-13s %-34s value=%-12.6g bound=%-12.6g", to_string(c.status).c_str(),
                  c.name.c_str(), c.value, c.bound);
    out << line << "  [" << c.anchor << "]";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
  out << "overall: " << to_string(overall()) << '\n';
}

WeightPhiN::WeightPhiN(int n, int dim, double extra) : n_(n), a_(0.5 * dim + extra) {
  if (n < 1) throw Error("weight index n must be >= 1");
}

double WeightPhiN::operator()(const Point& x, int dim) const {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += x[k] * x[k];
  const double r = std::sqrt(r2);
  if (r <= n_) return 1.0;
  return std::pow(n_ / r, a_);
}

double weighted_l1_distance(const Grid& grid, std::span<const double> u,
                            std::span<const double> v, const WeightPhiN& weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += std::abs(u[i] - v[i]) * weight(grid.center(i), grid.dim());
  }
  return s * grid.cell_volume();
}

// ------------------------------------------------------------- entropy

std::vector<EntropyResidual> entropy_residuals(const ProblemSpec& spec,
                                               const Trajectory& traj,
                                               const JumpPath& path,
                                               const EntropyTriple& triple,
                                               std::span<const TestFunction> psis) {
  const Grid& grid = traj.grid;
  const int dim = grid.dim();
  const std::size_t cells = grid.size();
  const double vol = grid.cell_volume();
  const double h = grid.spacing();
  const int steps = traj.steps;

  // Cellwise entropy quantities for every stored state.
  std::vector<Field> beta(steps + 1), nu(steps + 1), zeta[2], G(steps + 1), dbeta(steps + 1);
  for (int k = 0; k < dim; ++k) zeta[k].resize(steps + 1);
  for (int n = 0; n <= steps; ++n) {
    const Field& u = traj.states[n];
    beta[n].resize(cells);
    dbeta[n].resize(cells);
    G[n].resize(cells);
    if (n > 0) {
      nu[n].resize(cells);
      for (int k = 0; k < dim; ++k) zeta[k][n].resize(cells);
    }
    for (std::size_t i = 0; i < cells; ++i) {
      beta[n][i] = triple.beta(u[i]);
      dbeta[n][i] = triple.beta_prime(u[i]);
      G[n][i] = kirchhoff_G(spec.phi, u[i]);
      if (n > 0) {
        nu[n][i] = triple.nu(u[i]);
        for (int k = 0; k < dim; ++k) zeta[k][n][i] = triple.zeta(u[i], k);
      }
    }
  }

  std::vector<EntropyResidual> out;
  out.reserve(psis.size());
  for (const auto& psi : psis) {
    const TimeFactor& a = psi.time();
    const SpaceFactor& b = psi.space();
    std::vector<double> bx(cells), lap(cells);
    std::vector<Point> grad(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      const Point x = grid.center(i);
      bx[i] = b.value(x, dim);
      grad[i] = b.gradient(x, dim);
      lap[i] = b.laplacian(x, dim);
    }
    EntropyResidual r;
    // Endpoint terms.
    double start = 0.0, end = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      start += beta[0][i] * bx[i];
      end += beta[steps][i] * bx[i];
    }
    r.bulk = vol * (a.value(0.0) * start - a.value(traj.horizon()) * end);

    double dissipation = 0.0;
    for (int n = 0; n < steps; ++n) {
      const double t0 = traj.time(n), t1 = traj.time(n + 1);
      const double da = a.value(t1) - a.value(t0);
      const double wa = a.primitive(t1) - a.primitive(t0);
      if (da == 0.0 && wa == 0.0) continue;
      const Field& bn = beta[n + 1];
      double bulk = 0.0;
      for (std::size_t i = 0; i < cells; ++i) {
        if (bx[i] == 0.0 && lap[i] == 0.0 && grad[i][0] == 0.0 && grad[i][1] == 0.0) continue;
        double flux = 0.0;
        for (int k = 0; k < dim; ++k) flux += grad[i][k] * zeta[k][n + 1][i];
        bulk += da * bn[i] * bx[i] + wa * (nu[n + 1][i] * lap[i] - flux);
      }
      r.bulk += vol * bulk;

      if (wa == 0.0) continue;
      // beta''(u) |grad G(u)|^2 psi on faces, Dirichlet ghosts at u = G = 0.
      const Field& u = traj.states[n + 1];
      const Field& g = G[n + 1];
      const Field& db = dbeta[n + 1];
      const double ghost_db = triple.beta_prime(0.0);
      double face_sum = 0.0;
      for (int axis = 0; axis < dim; ++axis) {
        for (std::size_t i = 0; i < cells; ++i) {
          auto face = [&](double ul, double gl, double dl, double bl, double ur, double gr,
                          double dr, double br) {
            const double wb = 0.5 * (bl + br);
            if (wb == 0.0) return;
            const double du = ur - ul;
            const double b2 = du != 0.0 ? (dr - dl) / du : triple.beta_second(ul);
            const double dg = (gr - gl) / h;
            face_sum += wb * b2 * dg * dg;
          };
          const long right = grid.neighbor(i, axis, +1);
          if (right >= 0) {
            face(u[i], g[i], db[i], bx[i], u[right], g[right], db[right], bx[right]);
          } else {
            face(u[i], g[i], db[i], bx[i], 0.0, 0.0, ghost_db, bx[i]);
          }
          if (grid.neighbor(i, axis, -1) < 0) {
            face(0.0, 0.0, ghost_db, bx[i], u[i], g[i], db[i], bx[i]);
          }
        }
      }
      dissipation += wa * vol * face_sum;
    }
    r.dissipation = dissipation;
    const MartingaleParts parts = martingale_parts(path, spec, traj, triple, psi);
    r.martingale = parts.martingale();
    r.correction = parts.correction;
    r.value = r.bulk + r.martingale + r.correction - r.dissipation;
    out.push_back(r);
  }
  return out;
}

EntropyResidual entropy_residual(const ProblemSpec& spec, const Trajectory& traj,
                                 const JumpPath& path, const EntropyTriple& triple,
                                 const TestFunction& psi) {
  return entropy_residuals(spec, traj, path, triple, {&psi, 1}).front();
}

EntropyCalibration calibrate_entropy_constant(const ProblemSpec& spec, const Grid& grid,
                                              int steps, std::span<const double> thetas) {
  ProblemSpec lin = spec;
  const double c = spec.phi.lipschitz() > 0.0 ? spec.phi.lipschitz() : 1.0;
  lin.phi = Phi::linear(c);
  lin.flux = Flux::zero();
  lin.eta = NoiseAmplitude();
  lin.levy = LevyIntensity::none();
  const JumpPath empty({}, 0, spec.horizon);
  const auto psis = standard_test_functions(spec.dim, spec.half_width, spec.horizon);
  EntropyCalibration cal;
  for (int level = 0; level < 3; ++level) {
    const int scale = 1 << level;
    lin.epsilon = spec.epsilon / scale;
    const Grid g(grid.dim(), grid.half_width(), grid.cells_per_axis() * scale, grid.boundary());
    const int n = steps * scale;
    const Trajectory traj = solve_path(lin, g, n, empty);
    const double denom = lin.epsilon + g.spacing() + traj.dt;
    CalibrationRun run{g.cells_per_axis(), n, lin.epsilon, 0.0};
    for (double theta : thetas) {
      const auto triple = EntropyTriple::make_beta_theta(theta, lin.phi, lin.flux);
      for (const auto& r : entropy_residuals(lin, traj, empty, triple, psis)) {
        run.worst = std::max(run.worst, std::abs(r.value) / denom);
      }
    }
    cal.constant = std::max(cal.constant, run.worst);
    cal.runs.push_back(run);
  }
  return cal;
}

EntropyTestReport entropy_residual_test(const ProblemSpec& spec, const Grid& grid,
                                        int steps, const MonteCarlo& mc,
                                        std::span<const double> thetas, double constant) {
  const auto psis = standard_test_functions(spec.dim, spec.half_width, spec.horizon);
  const double dt = spec.horizon / steps;
  EntropyTestReport rep;
  rep.tolerance = entropy_tolerance(constant, spec.epsilon, grid.spacing(), dt);
  const std::vector<double> theta_list(thetas.begin(), thetas.end());
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const JumpPath path = mc.path(k);
    const Trajectory traj = solve_path(spec, grid, steps, path);
    std::vector<double> values;
    for (double theta : theta_list) {
      const auto triple = EntropyTriple::make_beta_theta(theta, spec.phi, spec.flux);
      for (const auto& r : entropy_residuals(spec, traj, path, triple, psis)) {
        values.push_back(r.value);
      }
    }
    return values;
  });
  rep.worst = std::numeric_limits<double>::infinity();
  for (const auto& values : per_path) {
    for (double v : values) {
      ++rep.evaluations;
      rep.worst = std::min(rep.worst, v);
      if (v < -rep.tolerance) ++rep.violations;
    }
  }
  rep.status = rep.violations == 0 ? Status::pass : Status::fail;
  return rep;
}

// -------------------------------------------------------------- energy

double energy_functional(const EnergyReport& rep) {
  const double sup = *std::max_element(rep.norm2.begin(), rep.norm2.end());
  return sup + rep.viscous.back() + rep.kirchhoff.back();
}

EnergyBoundReport energy_bound_test(const ProblemSpec& spec, const Grid& grid, int steps,
                                    const MonteCarlo& mc) {
  auto functional = [&](int n_steps) {
    auto reports = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
      const Trajectory traj = solve_path(spec, grid, n_steps, mc.path(k));
      return discrete_energy_report(traj, spec);
    });
    std::vector<double> mean_norm(n_steps + 1, 0.0);
    double visc = 0.0, kirch = 0.0;
    for (const auto& r : reports) {
      for (int n = 0; n <= n_steps; ++n) mean_norm[n] += r.norm2[n];
      visc += r.viscous.back();
      kirch += r.kirchhoff.back();
    }
    const double paths = static_cast<double>(reports.size());
    return *std::max_element(mean_norm.begin(), mean_norm.end()) / paths +
           visc / paths + kirch / paths;
  };
  EnergyBoundReport rep;
  rep.coarse = functional(steps);
  rep.fine = functional(2 * steps);
  rep.relative_change = std::abs(rep.fine - rep.coarse) / std::max(rep.coarse, 1e-300);
  const bool finite = std::isfinite(rep.coarse) && std::isfinite(rep.fine);
  rep.status = finite && rep.relative_change < 0.1 ? Status::pass : Status::fail;
  return rep;
}

// --------------------------------------------------------------- rates

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return kNaN;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

namespace {

void fit_slope(RateReport& rep) {
  std::vector<double> lx, ly;
  for (const auto& p : rep.points) {
    if (p.error > 0.0) {
      lx.push_back(std::log(p.parameter));
      ly.push_back(std::log(p.error));
    }
  }
  rep.slope = lx.size() >= 2 ? least_squares_slope(lx, ly) : kNaN;
  rep.ratios.clear();
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const double prev = rep.points[i - 1].error;
    rep.ratios.push_back(prev > 0.0 ? rep.points[i].error / prev : 0.0);
  }
}

// Squared L2(0,T; L2) distance of the piecewise constant interpolants of a
// coarse (N steps) and fine (2N steps) trajectory.
double interpolant_gap(const Trajectory& coarse, const Trajectory& fine) {
  double sum = 0.0;
  Field d(coarse.grid.size());
  for (int j = 0; j < fine.steps; ++j) {
    const Field& uc = coarse.states[j / 2 + 1];
    const Field& uf = fine.states[j + 1];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = uc[i] - uf[i];
    sum += fine.dt * l2_norm_squared(fine.grid, d);
  }
  return sum;
}

bool noiseless(const ProblemSpec& spec) {
  return spec.eta.is_zero() || spec.levy.total_mass() == 0.0;
}

}  // namespace

RateReport cauchy_rate_test(const ProblemSpec& spec, const Grid& grid, const MonteCarlo& mc,
                            std::span<const int> steps_list) {
  RateReport rep;
  const bool deterministic = noiseless(spec);
  rep.lane = deterministic ? "deterministic" : "stochastic";
  std::vector<int> coarse(steps_list.begin(), steps_list.end());
  std::sort(coarse.begin(), coarse.end());
  coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
  std::set<int> all;
  for (int n : coarse) {
    all.insert(n);
    all.insert(2 * n);
  }
  const std::size_t paths = deterministic ? std::min<std::size_t>(mc.paths, 1) : mc.paths;
  auto per_path = parallel_map(paths, mc.workers, [&](std::size_t k) {
    const JumpPath path = mc.path(k);
    std::map<int, Trajectory> solved;
    for (int n : all) solved.emplace(n, solve_path(spec, grid, n, refine_path(path, n)));
    std::vector<double> gaps;
    for (int n : coarse) gaps.push_back(interpolant_gap(solved.at(n), solved.at(2 * n)));
    return gaps;
  });
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    std::vector<double> samples;
    for (const auto& g : per_path) samples.push_back(g[i]);
    const auto stats = SampleStats::of(samples);
    rep.points.push_back({spec.horizon / coarse[i], stats.mean, stats.band()});
  }
  fit_slope(rep);
  if (rep.points.size() < 3 || !std::isfinite(rep.slope)) {
    rep.status = Status::inconclusive;
    rep.detail = "need at least 3 step sizes for a rate fit";
    return rep;
  }
  if (deterministic) {
    rep.status = rep.slope >= 1.7 && rep.slope <= 2.3 ? Status::pass : Status::fail;
    rep.detail = "noiseless lane: implicit Euler, error^2 = O(dt^2)";
    return rep;
  }
  for (const auto& p : rep.points) {
    if (p.band >= p.error) {
      rep.status = Status::inconclusive;
      rep.detail = "Monte-Carlo band exceeds the estimate";
      return rep;
    }
  }
  rep.status = rep.slope >= 0.8 && rep.slope <= 1.3 ? Status::pass : Status::fail;
  rep.detail = "slope of log error^2 vs log dt must lie in [0.8, 1.3]";
  return rep;
}

RateReport viscosity_convergence_test(const ProblemSpec& spec, const Grid& grid, int steps,
                                      const MonteCarlo& mc, std::span<const double> eps_list) {
  RateReport rep;
  rep.lane = "viscosity";
  std::vector<double> eps(eps_list.begin(), eps_list.end());
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<double> all = eps;
  for (double e : eps) all.push_back(0.5 * e);
  std::sort(all.begin(), all.end(), std::greater<>());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const JumpPath path = mc.path(k);
    std::map<double, Trajectory> solved;
    for (double e : all) {
      ProblemSpec s = spec;
      s.epsilon = e;
      solved.emplace(e, solve_path(s, grid, steps, path));
    }
    std::vector<double> diffs;
    for (double e : eps) {
      const Trajectory& a = solved.at(e);
      const Trajectory& b = solved.at(0.5 * e);
      double sum = 0.0;
      for (int n = 1; n <= steps; ++n) {
        for (std::size_t i = 0; i < a.grid.size(); ++i) {
          sum += std::pow(std::abs(a.states[n][i] - b.states[n][i]), 1.5);
        }
      }
      diffs.push_back(std::cbrt(std::pow(sum * a.dt * grid.cell_volume(), 2.0)));
    }
    return diffs;
  });
  std::vector<std::vector<double>> samples(eps.size());
  for (const auto& d : per_path) {
    for (std::size_t i = 0; i < eps.size(); ++i) samples[i].push_back(d[i]);
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto stats = SampleStats::of(samples[i]);
    rep.points.push_back({eps[i], stats.mean, stats.band()});
  }
  fit_slope(rep);
  if (rep.points.size() < 2) {
    rep.status = Status::inconclusive;
    rep.detail = "need at least 2 viscosities";
    return rep;
  }
  const bool all_zero = std::all_of(rep.points.begin(), rep.points.end(),
                                    [](const RatePoint& p) { return p.error == 0.0; });
  if (all_zero) {
    rep.status = Status::pass;
    rep.detail = "all differences vanish";
    return rep;
  }
  rep.status = Status::pass;
  rep.detail = "successive ratios must be <= 0.9";
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const double m1 = rep.points[i - 1].error, m2 = rep.points[i].error;
    const double r = m1 > 0.0 ? m2 / m1 : std::numeric_limits<double>::infinity();
    if (r <= 0.9) continue;
    // Delta method for the ratio of two correlated means.
    const auto s1 = SampleStats::of(samples[i - 1]);
    const auto s2 = SampleStats::of(samples[i]);
    double cov = 0.0;
    const std::size_t n = samples[i].size();
    for (std::size_t j = 0; j < n; ++j) {
      cov += (samples[i - 1][j] - s1.mean) * (samples[i][j] - s2.mean);
    }
    cov = n > 1 ? cov / (n - 1) / n : 0.0;
    const double var = r * r *
                       (s1.std_error * s1.std_error / (m1 * m1) +
                        s2.std_error * s2.std_error / (m2 * m2) - 2.0 * cov / (m1 * m2));
    const double sigma = std::sqrt(std::max(var, 0.0));
    if (r - 3.0 * sigma <= 0.9) {
      if (rep.status == Status::pass) rep.status = Status::inconclusive;
      rep.detail = "a ratio above 0.9 lies within the Monte-Carlo band";
    } else {
      rep.status = Status::fail;
      rep.detail = "a ratio exceeds 0.9 beyond the Monte-Carlo band";
    }
  }
  return rep;
}

// --------------------------------------------------- contraction, moments

namespace {

// Smallest C >= 0 with values[n] <= e^{C t_n} values[0].
double growth_rate(const std::vector<double>& values, double dt) {
  double c = 0.0;
  if (!(values.front() > 0.0)) return 0.0;
  for (std::size_t n = 1; n < values.size(); ++n) {
    if (values[n] > values.front()) {
      c = std::max(c, std::log(values[n] / values.front()) / (n * dt));
    }
  }
  return c;
}

bool rate_stable(double a, double b, double floor) {
  return std::abs(a - b) <= 0.2 * std::max(std::abs(a), std::abs(b)) + floor;
}

// Absolute slack for the stability comparison of fitted rates near zero.
constexpr double kRateFloor = 0.05;

}  // namespace

ContractionReport contraction_test(const ProblemSpec& spec, const Grid& grid,
                                   const Field& u0, const Field& v0,
                                   const WeightPhiN& weight, const MonteCarlo& mc, int steps) {
  struct PathResult {
    std::vector<double> coarse, fine;
    double same = 0.0;
  };
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const JumpPath path = mc.path(k);
    PathResult r;
    for (int level = 0; level < 2; ++level) {
      const int n = steps << level;
      const Trajectory tu = solve_path(spec, grid, n, path, u0);
      const Trajectory tv = solve_path(spec, grid, n, path, v0);
      auto& dist = level == 0 ? r.coarse : r.fine;
      for (int j = 0; j <= n; ++j) {
        dist.push_back(weighted_l1_distance(grid, tu.states[j], tv.states[j], weight));
      }
      if (level == 0) {
        const Trajectory again = solve_path(spec, grid, n, path, u0);
        for (int j = 0; j <= n; ++j) {
          r.same = std::max(r.same, weighted_l1_distance(grid, tu.states[j], again.states[j], weight));
        }
      }
    }
    return r;
  });
  ContractionReport rep;
  std::vector<double> fine(2 * steps + 1, 0.0);
  rep.distance.assign(steps + 1, 0.0);
  for (const auto& r : per_path) {
    for (int j = 0; j <= steps; ++j) rep.distance[j] += r.coarse[j] / per_path.size();
    for (int j = 0; j <= 2 * steps; ++j) fine[j] += r.fine[j] / per_path.size();
    rep.same_data_distance = std::max(rep.same_data_distance, r.same);
  }
  const double dt = spec.horizon / steps;
  for (int j = 0; j <= steps; ++j) rep.times.push_back(j * dt);
  rep.fitted_rate = growth_rate(rep.distance, dt);
  rep.refined_rate = growth_rate(fine, 0.5 * dt);
  const double l1 = l1_norm(grid, u0);
  const bool zero_ok = rep.same_data_distance <= 1e-8 * std::max(l1, 1e-300);
  const bool stable = rate_stable(rep.fitted_rate, rep.refined_rate, kRateFloor);
  rep.status = zero_ok && stable && std::isfinite(rep.fitted_rate) ? Status::pass : Status::fail;
  rep.detail = !zero_ok ? "distinct results for identical data"
               : !stable ? "fitted rate changes by more than 20% under dt halving"
                         : "";
  return rep;
}

double linear_moment_rate(const ProblemSpec& spec, int p) {
  const bool constant_data =
      spec.u0.kind() == InitialData::Kind::constant || spec.u0.kind() == InitialData::Kind::zero;
  const auto& g = spec.eta.profile();
  const auto& sigma = spec.eta.factor();
  const auto sd = sigma.describe();
  double lambda = kNaN;
  if (sigma.kind() == StateFactor::Kind::linear) lambda = sd.params.at("lambda");
  if (sigma.kind() == StateFactor::Kind::affine && sd.params.at("a") == 0.0) {
    lambda = sd.params.at("b");
  }
  if (!constant_data || spec.boundary != Boundary::periodic ||
      g.kind() != SpatialProfile::Kind::constant || std::isnan(lambda)) {
    return kNaN;
  }
  const double amp = g.describe().params.at("amp");
  double k = 0.0;
  for (const auto& node : spec.levy.nodes()) {
    const double y = amp * lambda * node.mark.size;
    k += node.weight * (std::pow(1.0 + y, p) - 1.0 - p * y);
  }
  return k;
}

MomentReport moment_bound_test(const ProblemSpec& spec, const Grid& grid, int p,
                               const MonteCarlo& mc, int steps) {
  if (p < 2 || p % 2 != 0) throw Error("moment power must be even and >= 2");
  struct PathResult {
    std::vector<double> coarse, fine;
  };
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const JumpPath path = mc.path(k);
    PathResult r;
    for (int level = 0; level < 2; ++level) {
      const Trajectory traj = solve_path(spec, grid, steps << level, path);
      auto& m = level == 0 ? r.coarse : r.fine;
      for (const auto& u : traj.states) m.push_back(lp_integral(grid, u, p));
    }
    return r;
  });
  MomentReport rep;
  rep.power = p;
  const double dt = spec.horizon / steps;
  rep.moment.assign(steps + 1, 0.0);
  std::vector<double> fine(2 * steps + 1, 0.0), last;
  for (const auto& r : per_path) {
    for (int j = 0; j <= steps; ++j) rep.moment[j] += r.coarse[j] / per_path.size();
    for (int j = 0; j <= 2 * steps; ++j) fine[j] += r.fine[j] / per_path.size();
    last.push_back(r.fine.back());
  }
  for (int j = 0; j <= steps; ++j) rep.times.push_back(j * dt);
  rep.oracle_rate = linear_moment_rate(spec, p);
  const double m0 = rep.moment.front();
  if (!(m0 > 0.0)) {
    const bool zero = std::all_of(rep.moment.begin(), rep.moment.end(),
                                  [](double m) { return m == 0.0; });
    rep.status = zero ? Status::pass : Status::fail;
    rep.detail = zero ? "zero data stays zero" : "moments grew from zero data";
    return rep;
  }
  rep.fitted_rate = growth_rate(rep.moment, dt);
  rep.refined_rate = growth_rate(fine, 0.5 * dt);
  const auto stats = SampleStats::of(last);
  rep.final_rate = std::log(stats.mean / m0) / spec.horizon;
  rep.final_rate_sigma = stats.std_error / stats.mean / spec.horizon;
  const bool finite = std::isfinite(rep.fitted_rate) && std::isfinite(rep.refined_rate);
  const bool stable =
      std::abs(rep.fitted_rate - rep.refined_rate) <=
      std::max(0.2 * std::max(rep.fitted_rate, rep.refined_rate), 3.0 * rep.final_rate_sigma) +
          kRateFloor;
  bool oracle_ok = true;
  if (!std::isnan(rep.oracle_rate)) {
    oracle_ok = std::abs(rep.final_rate - rep.oracle_rate) <= 3.0 * rep.final_rate_sigma;
  }
  rep.status = finite && stable && oracle_ok ? Status::pass : Status::fail;
  rep.detail = !finite   ? "no finite rate"
               : !stable ? "fitted rate unstable under dt halving"
               : !oracle_ok ? "rate outside the 3 sigma band of the closed form"
                            : "";
  return rep;
}

BoundReport max_principle_test(const ProblemSpec& spec, const Grid& grid, double M,
                               const MonteCarlo& mc, int steps) {
  const double radius = spec.eta.factor().support_radius();
  if (!spec.eta.is_zero() && radius > M) {
    throw InvalidSpec("eta", radius, "noise amplitude does not vanish for |u| > M");
  }
  const double m1 = spec.eta.is_zero()
                        ? 0.0
                        : spec.eta.profile().sup() * spec.eta.factor().sup_on(M) *
                              spec.levy.max_jump_size();
  const Field u0 = discretize_initial(spec, grid, spec.margin);
  BoundReport rep;
  rep.bound = max_principle_bound(M, m1, sup_norm(u0));
  if (spec.eta.is_zero()) rep.bound = sup_norm(u0);
  rep.tolerance = 1e-6 * rep.bound;
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const Trajectory traj = solve_path(spec, grid, steps, mc.path(k));
    std::pair<double, std::size_t> r{0.0, 0};
    for (const auto& u : traj.states) {
      for (double x : u) {
        r.first = std::max(r.first, std::abs(x));
        if (std::abs(x) > rep.bound + rep.tolerance) ++r.second;
      }
    }
    return r;
  });
  for (const auto& [mx, bad] : per_path) {
    rep.max_abs = std::max(rep.max_abs, mx);
    rep.violations += bad;
  }
  rep.status = rep.violations == 0 ? Status::pass : Status::fail;
  return rep;
}

IsometryReport noise_isometry_test(const ProblemSpec& spec, const Grid& grid,
                                   const MonteCarlo& mc) {
  const Field u0 = discretize_initial(spec, grid, spec.margin);
  auto per_path = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    return compensated_increment(mc.path(k), spec, grid, u0, 0.0, spec.horizon);
  });
  IsometryReport rep;
  const double m2 = spec.levy.size_moment(2);
  const double n = static_cast<double>(per_path.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double gs = spec.eta.spatial(grid.center(i), grid.dim()) * spec.eta.state(u0[i]);
    const double predicted = spec.horizon * gs * gs * m2;
    if (predicted == 0.0) continue;
    ++rep.cells;
    double mean = 0.0;
    for (const auto& f : per_path) mean += f[i] / n;
    double c2 = 0.0, c4 = 0.0;
    for (const auto& f : per_path) {
      const double d = f[i] - mean;
      c2 += d * d;
      c4 += d * d * d * d;
    }
    const double var = c2 / (n - 1.0);
    // Standard error of the sample variance from the fourth central moment.
    const double se = std::sqrt(std::max(c4 / n - (c2 / n) * (c2 / n), 0.0) / n);
    const double z = se > 0.0 ? std::abs(var - predicted) / se
                               : (var == predicted ? 0.0 : std::numeric_limits<double>::infinity());
    if (z >= rep.worst_z) {
      rep.worst_z = z;
      rep.predicted = predicted;
      rep.sample = var;
    }
  }
  rep.status = rep.worst_z <= 3.0 ? Status::pass : Status::fail;
  return rep;
}

}  // namespace levylab
