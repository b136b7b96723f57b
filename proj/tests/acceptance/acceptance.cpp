// Acceptance driver: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 7        run criteria 3 and 7
// Exit status is 0 only when every selected criterion passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levylab/diagnostics.hpp"
#include "levylab/entropy.hpp"
#include "levylab/experiment.hpp"
#include "levylab/solver.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace levylab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig load(const std::string& name) {
  return ExperimentConfig::load(fs::path(LEVYLAB_CONFIG_DIR) / name);
}

MonteCarlo mc_of(const ExperimentConfig& cfg, std::size_t paths = 0) {
  return MonteCarlo::sampled(cfg.spec.levy, cfg.spec.horizon, cfg.seed,
                             paths ? paths : cfg.paths, 1);
}

// ------------------------------------------------------------------ 1

Outcome crit_entropy_identities() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> pick(-5.0, 5.0);
  double worst_sym = 0.0, worst_one = 0.0, worst_two = 0.0, worst_sign = 0.0;
  std::size_t pairs = 0;
  for (double theta : {1.0, 0.1, 0.01}) {
    for (int k = 0; k < 1000; ++k) {
      const bool porous = k % 2 == 0;
      const Phi phi = porous ? Phi::porous(1.0, 1.0) : Phi::stefan(1.0, 1.0);
      const oracle::SqrtPhiPrime root{porous, 1.0, 1.0};
      const auto triple = EntropyTriple::make_beta_theta(theta, phi, Flux::zero());
      const double a = pick(rng), b = pick(rng);
      const double iab = I_beta(a, b, triple), iba = I_beta(b, a, triple);
      worst_sym = std::max(worst_sym, std::abs(iab - iba));
      worst_one = std::max(worst_one, std::abs(iab - oracle::identity_product(a, b, theta, root)));
      const double lhs = 2.0 * iab + phi_beta(a, b, triple) + phi_beta(b, a, triple);
      const double rhs = oracle::identity_square(a, b, theta, root);
      worst_two = std::max(worst_two, std::abs(lhs - rhs));
      worst_sign = std::min(worst_sign, rhs);
      ++pairs;
    }
  }
  const double tol = 1e-7;
  return {worst_sym <= tol && worst_one <= tol && worst_two <= tol && worst_sign >= 0.0,
          fmt("%zu pairs: symmetry %.2e, product identity %.2e, square identity %.2e (tol %.0e)",
              pairs, worst_sym, worst_one, worst_two, tol)};
}

// ------------------------------------------------------------------ 2

Outcome crit_beta_sandwich() {
  const double m1 = 5.0 / 16.0, m2 = 15.0 / 8.0, tol = 1e-12;
  std::size_t bad = 0;
  double tightest = 0.0;
  for (double theta : {1.0, 0.1, 0.01}) {
    const auto t = EntropyTriple::make_beta_theta(theta, Phi::linear(1.0), Flux::zero());
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double r = -3.0 * theta + 6.0 * theta * i / (n - 1);
      const double b = t.beta(r), b2 = t.beta_second(r);
      if (b > std::abs(r) + tol || b < std::abs(r) - m1 * theta - tol) ++bad;
      const double cap = std::abs(r) <= theta ? m2 / theta : 0.0;
      if (std::abs(b2) > cap + tol) ++bad;
      tightest = std::max(tightest, (std::abs(r) - b) / theta);
    }
  }
  // The lower bound is attained outside the smoothing window.
  const bool sharp = std::abs(tightest - m1) <= 1e-12;
  return {bad == 0 && sharp,
          fmt("%zu violations on 3 x 10^4 mesh points, max (|r|-beta)/theta = %.15f", bad,
              tightest)};
}

// ------------------------------------------------------------------ 3

Outcome crit_implicit_step_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int m = 64;
  double worst = 0.0;
  int states = 0;
  for (Boundary bc : {Boundary::dirichlet, Boundary::periodic}) {
    for (int k = 0; k < 100; ++k) {
      ProblemSpec spec;
      const double c = 0.5 + 1.5 * (0.5 + 0.5 * unit(rng));
      const double b = unit(rng);
      spec.phi = Phi::linear(c);
      spec.flux = Flux::linear(b);
      spec.epsilon = 0.01 + 0.19 * (0.5 + 0.5 * unit(rng));
      spec.half_width = 2.0;
      spec.boundary = bc;
      const Grid grid(1, spec.half_width, m, bc);
      const double dt = std::pow(10.0, -3.0 + 2.0 * (0.5 + 0.5 * unit(rng)));
      Field x(m);
      for (auto& v : x) v = unit(rng);
      const Field zero(m, 0.0);
      const Field u = implicit_step(spec, grid, x, zero, dt);

      const double h = grid.spacing();
      const double diff = dt * (c + spec.epsilon) / (h * h);
      const double adv = dt * b / (2.0 * h);
      // Row i: (1 + 2 diff) u_i - (diff - adv) u_{i-1} - (diff + adv) u_{i+1} = x_i.
      std::vector<double> ref;
      if (bc == Boundary::dirichlet) {
        ref = oracle::banded_solve(
            m, 1, 1,
            [&](int i, int j) {
              if (i == j) return 1.0 + 2.0 * diff;
              return j < i ? -(diff - adv) : -(diff + adv);
            },
            x);
      } else {
        std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
        for (int i = 0; i < m; ++i) {
          a[i][i] = 1.0 + 2.0 * diff;
          a[i][(i + m - 1) % m] += -(diff - adv);
          a[i][(i + 1) % m] += -(diff + adv);
        }
        ref = oracle::dense_solve(a, x);
      }
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += h * (u[i] - ref[i]) * (u[i] - ref[i]);
      worst = std::max(worst, std::sqrt(s));
      ++states;
    }
  }
  return {worst <= 1e-12, fmt("%d states, max discrete L2 gap %.2e (tol 1e-12)", states, worst)};
}

// ------------------------------------------------------------------ 4

Outcome crit_energy_estimate() {
  const auto cfg = load("bundled.cfg");
  const auto e = energy_bound_test(cfg.spec, cfg.grid(), cfg.steps, mc_of(cfg));
  const bool bounded = std::isfinite(e.coarse) && std::isfinite(e.fine);
  return {bounded && e.relative_change < 0.1,
          fmt("%zu paths: Q(N)=%.6g Q(2N)=%.6g relative change %.4f (< 0.1)", cfg.paths,
              e.coarse, e.fine, e.relative_change)};
}

// ------------------------------------------------------------------ 5

Outcome crit_entropy_residual() {
  const auto cfg = load("bundled.cfg");
  const double c = cfg.tol_constant.value();
  const auto e = entropy_residual_test(cfg.spec, cfg.grid(), cfg.steps, mc_of(cfg),
                                       cfg.thetas, c);
  return {e.violations == 0 && e.evaluations == cfg.paths * 5 * cfg.thetas.size(),
          fmt("%zu residuals, %zu below -tol; min R %.5f vs -tol %.5f (C = %.6f)",
              e.evaluations, e.violations, e.worst, -e.tolerance, c)};
}

// ------------------------------------------------------------------ 6

Outcome crit_cauchy_rate() {
  const auto cfg = load("bundled.cfg");
  const auto r = cauchy_rate_test(cfg.spec, cfg.grid(), mc_of(cfg), cfg.steps_list);
  std::string pts;
  for (const auto& p : r.points) pts += fmt(" (%.5g, %.3e)", p.parameter, p.error);
  return {r.slope >= 0.8 && r.slope <= 1.3 && r.points.size() == 4,
          fmt("slope %.4f in [0.8, 1.3];", r.slope) + pts};
}

// ------------------------------------------------------------------ 7

Outcome crit_contraction() {
  const auto cfg = load("contraction.cfg");
  const Grid grid = cfg.grid();
  const ProblemSpec& spec = cfg.spec;
  const Field u0 = discretize_initial(spec, grid, spec.margin);
  ProblemSpec bump = spec;
  bump.u0 = cfg.perturbation;
  Field v0 = discretize_initial(bump, grid, spec.margin);
  for (std::size_t i = 0; i < v0.size(); ++i) v0[i] += u0[i];
  const auto r = contraction_test(spec, grid, u0, v0, WeightPhiN(cfg.weight_n, spec.dim),
                                  mc_of(cfg), cfg.steps);
  const double zero_bound = 1e-8 * l1_norm(grid, u0);
  // distance(t) <= e^{Ct} distance(0) at every recorded time with the fitted C.
  bool envelope = true;
  for (std::size_t n = 0; n < r.times.size(); ++n) {
    if (r.distance[n] > std::exp(r.fitted_rate * r.times[n]) * r.distance[0] * (1 + 1e-12)) {
      envelope = false;
    }
  }
  const double gap = std::abs(r.fitted_rate - r.refined_rate);
  const double allowed = 0.2 * std::max(std::abs(r.fitted_rate), std::abs(r.refined_rate));
  return {r.same_data_distance <= zero_bound && envelope && gap <= allowed,
          fmt("same data %.2e (<= %.2e); C(N)=%.4f C(2N)=%.4f, gap %.4f <= %.4f",
              r.same_data_distance, zero_bound, r.fitted_rate, r.refined_rate, gap, allowed)};
}

// ------------------------------------------------------------------ 8

Outcome crit_max_principle() {
  const auto cfg = load("max-principle.cfg");
  const auto b = max_principle_test(cfg.spec, cfg.grid(), cfg.max_principle_M, mc_of(cfg),
                                    cfg.steps);
  const double expected = std::max(1.0 + 0.5, 0.2);
  return {b.violations == 0 && b.max_abs <= 1.5 + 1e-6 && std::abs(b.bound - expected) < 1e-15,
          fmt("%zu paths: max |u_n| %.6f <= %.6f + 1e-6, %zu violations", cfg.paths, b.max_abs,
              b.bound, b.violations)};
}

// ------------------------------------------------------------------ 9

Outcome crit_moments() {
  const auto cfg = load("moments-linear.cfg");
  const double A = 0.5, lambda = 0.4;
  bool ok = true;
  std::string detail;
  for (int p : {2, 4}) {
    // E|u|^p for u' = A lambda u dL with atoms v = +-1 of mass 1.5 each.
    double k = 0.0;
    for (double v : {-1.0, 1.0}) {
      k += 1.5 * (std::pow(1.0 + A * lambda * v, p) - 1.0 - p * A * lambda * v);
    }
    const auto m = moment_bound_test(cfg.spec, cfg.grid(), p, mc_of(cfg), cfg.steps);
    const double dev = std::abs(m.final_rate - k);
    const bool finite = std::isfinite(m.fitted_rate) && std::isfinite(m.refined_rate);
    ok = ok && finite && dev <= 3.0 * m.final_rate_sigma &&
         std::abs(m.oracle_rate - k) <= 1e-12 && m.status == Status::pass;
    detail += fmt("p=%d: K %.4f vs closed form %.4f (3 sigma %.4f), K(N)=%.4f K(2N)=%.4f; ", p,
                  m.final_rate, k, 3.0 * m.final_rate_sigma, m.fitted_rate, m.refined_rate);
  }
  return {ok, detail};
}

// ----------------------------------------------------------------- 10

Outcome crit_noise_isometry() {
  auto cfg = load("linear-smoke.cfg");
  const std::size_t paths = 10000;
  const auto r = noise_isometry_test(cfg.spec, cfg.grid(), mc_of(cfg, paths));
  // T g^2 sigma(u0)^2 sum v^2 m, with sigma = lambda u and atoms +-1 of mass 1.
  const Grid grid = cfg.grid();
  const Field u0 = discretize_initial(cfg.spec, grid, 0.0);
  bool predicted_ok = false;
  for (double u : u0) {
    const double gs = 0.3 * 0.5 * u;
    const double hand = 0.5 * gs * gs * 2.0;
    if (hand > 0.0 && std::abs(r.predicted - hand) <= 1e-12 * hand) predicted_ok = true;
  }
  return {r.cells > 0 && r.worst_z <= 3.0 && predicted_ok,
          fmt("%zu paths, %zu cells: worst |z| %.3f (<= 3), predicted %.6f sample %.6f", paths,
              r.cells, r.worst_z, r.predicted, r.sample)};
}

// ----------------------------------------------------------------- 11

Outcome crit_viscosity_limit() {
  const auto cfg = load("bundled.cfg");
  const auto r = viscosity_convergence_test(cfg.spec, cfg.grid(), cfg.steps, mc_of(cfg),
                                            cfg.eps_list);
  const std::vector<double> pinned{0.2, 0.1, 0.05, 0.025};
  bool ok = cfg.eps_list == pinned && r.ratios.size() == pinned.size() - 1;
  std::string detail = "ratios";
  for (double q : r.ratios) {
    ok = ok && q <= 0.9;
    detail += fmt(" %.4f", q);
  }
  for (std::size_t k = 1; k < r.points.size(); ++k) ok = ok && r.points[k].error < r.points[k - 1].error;
  return {ok, detail + " (each <= 0.9)"};
}

// ----------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome crit_replay_determinism() {
  const fs::path root = fs::path(LEVYLAB_WORK_DIR) / "acceptance-replay";
  fs::remove_all(root);
  bool ok = true;
  std::string detail;
  for (const char* name : {"linear-smoke.cfg", "max-principle.cfg"}) {
    const auto cfg = load(name);
    RunOptions first;
    first.out = root / name / "run";
    run_experiment(cfg, first);
    RunOptions again;
    again.out = root / name / "replay";
    again.workers = 3;
    replay(first.out / "manifest.txt", again);
    std::size_t files = 0;
    for (const char* f : {"report.csv", "rates.csv", "energy.csv", "summary.txt"}) {
      const fs::path a = first.out / f, b = again.out / f;
      if (!fs::exists(a)) continue;
      ++files;
      if (slurp(a) != slurp(b)) {
        ok = false;
        detail += fmt("%s/%s differs; ", name, f);
      }
    }
    detail += fmt("%s: %zu files identical; ", name, files);
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "entropy-kit identities", crit_entropy_identities},
      {2, "beta sandwich", crit_beta_sandwich},
      {3, "implicit step oracle", crit_implicit_step_oracle},
      {4, "discrete energy estimate", crit_energy_estimate},
      {5, "entropy residual", crit_entropy_residual},
      {6, "Cauchy rate", crit_cauchy_rate},
      {7, "contraction", crit_contraction},
      {8, "maximum principle", crit_max_principle},
      {9, "Lp moments", crit_moments},
      {10, "noise isometry", crit_noise_isometry},
      {11, "viscosity limit", crit_viscosity_limit},
      {12, "replay determinism", crit_replay_determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::stoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
