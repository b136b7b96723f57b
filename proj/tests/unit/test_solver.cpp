#include <cmath>
#include <random>

#include "doctest.h"
#include "levylab/errors.hpp"
#include "levylab/solver.hpp"
#include "oracle.hpp"

using namespace levylab;

namespace {

Field random_field(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(-scale, scale);
  Field u(n);
  for (auto& v : u) v = pick(rng);
  return u;
}

ProblemSpec nonlinear_spec(bool monotone) {
  ProblemSpec s;
  s.phi = Phi::stefan(1.0, 0.5);
  s.flux = Flux::burgers(1.0, 10.0);
  s.epsilon = 0.05;
  s.half_width = 2.0;
  s.monotone_flux = monotone;
  return s;
}

double l2_gap(const Grid& g, const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * g.cell_volume());
}

}  // namespace

TEST_CASE("without spatial terms the step returns the explicit state") {
  ProblemSpec s;
  s.epsilon = 0.0;
  const Grid g(1, 1.0, 16, Boundary::periodic);
  const Field x = random_field(16, 1);
  const Field noise = random_field(16, 2, 0.1);
  const Field u = implicit_step(s, g, x, noise, 0.1);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(x[i] + noise[i]).epsilon(1e-14));
}

TEST_CASE("constants are preserved and mass is conserved under periodic boundaries") {
  for (bool monotone : {false, true}) {
    const ProblemSpec s = nonlinear_spec(monotone);
    const Grid g(1, 2.0, 64, Boundary::periodic);
    const Field zero(64, 0.0);
    const Field c(64, 0.7);
    for (double v : implicit_step(s, g, c, zero, 0.05)) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
    const Field x = random_field(64, 3, 2.0);
    StepStats st;
    const Field u = implicit_step(s, g, x, zero, 0.05, &st);
    CHECK(total_mass(g, u) == doctest::Approx(total_mass(g, x)).epsilon(1e-10).scale(1.0));
    CHECK(st.residual <= st.tolerance);
    CHECK(st.tolerance == doctest::Approx(1e-10 * (1.0 + std::sqrt(l2_norm_squared(g, x)))));
  }
}

TEST_CASE("Jacobian matches finite differences of the operator") {
  for (bool monotone : {false, true}) {
    ProblemSpec s = nonlinear_spec(monotone);
    s.phi = Phi::porous(1.0, 1.0);
    for (Boundary bc : {Boundary::periodic, Boundary::dirichlet}) {
      const Grid g(1, 2.0, 12, bc);
      const SpatialOperator op(s, g);
      const Field u = random_field(12, 9, 2.0);
      std::vector<MatrixEntry> entries;
      op.jacobian(u, 1.0, entries);
      std::vector<std::vector<double>> jac(12, std::vector<double>(12, 0.0));
      for (const auto& e : entries) jac[e.row][e.col] += e.value;
      for (std::size_t j = 0; j < 12; ++j) {
        Field up = u, dn = u;
        const double h = 1e-6;
        up[j] += h;
        dn[j] -= h;
        Field fu(12), fd(12);
        op.apply(up, fu);
        op.apply(dn, fd);
        for (std::size_t i = 0; i < 12; ++i) {
          CHECK(jac[i][j] == doctest::Approx((fu[i] - fd[i]) / (2 * h)).epsilon(1e-5).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("linear Dirichlet step matches a banded direct solve") {
  ProblemSpec s;
  s.phi = Phi::linear(1.3);
  s.flux = Flux::linear(-0.6);
  s.epsilon = 0.1;
  s.boundary = Boundary::dirichlet;
  const Grid g(1, 1.0, 40, Boundary::dirichlet);
  const Field x = random_field(40, 5);
  const double dt = 0.02, h = g.spacing();
  const double d = dt * (1.3 + 0.1) / (h * h), a = dt * -0.6 / (2 * h);
  const Field u = implicit_step(s, g, x, Field(40, 0.0), dt);
  const auto ref = oracle::banded_solve(
      40, 1, 1,
      [&](int i, int j) { return i == j ? 1 + 2 * d : (j < i ? -(d - a) : -(d + a)); }, x);
  CHECK(l2_gap(g, u, ref) < 1e-12);
}

TEST_CASE("monotone flux keeps ordered data ordered") {
  const ProblemSpec s = nonlinear_spec(true);
  const Grid g(1, 2.0, 64, Boundary::periodic);
  Field u0 = random_field(64, 11, 1.5);
  Field v0 = u0;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lift(0.0, 0.5);
  for (auto& v : v0) v += lift(rng);
  const JumpPath none({}, 1, s.horizon);
  const auto tu = solve_path(s, g, 20, none, u0);
  const auto tv = solve_path(s, g, 20, none, v0);
  for (int n = 0; n <= 20; ++n) {
    for (std::size_t i = 0; i < 64; ++i) CHECK(tu.states[n][i] <= tv.states[n][i] + 1e-9);
  }
}

TEST_CASE("time stepping converges at first order in dt") {
  ProblemSpec s = nonlinear_spec(false);
  s.u0 = InitialData::bump(1.5, 1.0);
  s.horizon = 0.5;
  const Grid g(1, 2.0, 64, Boundary::periodic);
  const JumpPath none({}, 1, s.horizon);
  const Field ref = solve_path(s, g, 1024, none).states.back();
  std::vector<double> err;
  for (int n : {16, 32, 64}) err.push_back(l2_gap(g, solve_path(s, g, n, none).states.back(), ref));
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double ratio = err[k - 1] / err[k];
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.6);
  }
}

TEST_CASE("solve_path is deterministic and applies the noise of each window") {
  ProblemSpec s = nonlinear_spec(false);
  s.u0 = InitialData::bump(1.0, 1.0);
  s.eta = NoiseAmplitude(SpatialProfile::constant(0.5), StateFactor::affine(0.2, 0.3));
  s.levy = LevyIntensity::atoms({-1.0, 1.0}, {1.5, 1.5});
  const Grid g(1, 2.0, 32, Boundary::periodic);
  const JumpPath p = sample_jump_path(s.levy, s.horizon, 3);
  const auto a = solve_path(s, g, 16, p), b = solve_path(s, g, 16, p);
  REQUIRE(a.states.size() == 17u);
  REQUIRE(a.increments.size() == 16u);
  for (int n = 0; n <= 16; ++n) {
    for (std::size_t i = 0; i < 32; ++i) CHECK(a.states[n][i] == b.states[n][i]);
  }
  for (int n = 0; n < 16; ++n) {
    const Field inc = compensated_increment(p, s, g, a.states[n], a.time(n), a.time(n + 1));
    for (std::size_t i = 0; i < 32; ++i) CHECK(a.increments[n][i] == inc[i]);
    CHECK(a.stats[n].residual <= a.stats[n].tolerance);
  }
}

TEST_CASE("a starved solver reports the failing step") {
  ProblemSpec s = nonlinear_spec(false);
  s.u0 = InitialData::bump(3.0, 1.0);
  const Grid g(1, 2.0, 32, Boundary::periodic);
  SolverOptions o;
  o.max_newton = 0;
  o.max_picard = 1;
  const JumpPath none({}, 1, s.horizon);
  try {
    solve_path(s, g, 4, none, o);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 0);
    CHECK_FALSE(e.residual_history().empty());
  }
  CHECK_THROWS_AS(implicit_step(s, Grid(1, 2.0, 2, Boundary::periodic), Field(2), Field(2), 0.1), Error);
}

TEST_CASE("two-dimensional smoke run conserves mass") {
  ProblemSpec s = nonlinear_spec(false);
  s.dim = 2;
  s.flux = Flux::burgers(1.0, 10.0, {1.0, 0.5});
  s.u0 = InitialData::bump(1.0, 1.0);
  s.horizon = 0.1;
  const Grid g(2, 2.0, 64, Boundary::periodic);
  const JumpPath none({}, 1, s.horizon);
  const auto t = solve_path(s, g, 4, none);
  CHECK(total_mass(g, t.states.back()) ==
        doctest::Approx(total_mass(g, t.states.front())).epsilon(1e-9));
  for (const auto& st : t.stats) CHECK(st.residual <= st.tolerance);
}

TEST_CASE("interpolants") {
  const Grid g(1, 1.0, 4, Boundary::periodic);
  Trajectory t(g, 0.5, 2);
  t.states = {Field(4, 0.0), Field(4, 1.0), Field(4, 1.0)};
  t.increments = {Field(4, 0.25), Field(4, -0.5)};
  const Interpolants in(t);
  CHECK(in.piecewise_constant(0.1)[0] == 1.0);
  CHECK(in.piecewise_constant(-1.0)[0] == 0.0);
  CHECK(in.piecewise_constant(5.0)[0] == 1.0);
  CHECK(in.linear(0.25)[0] == doctest::Approx(0.5));
  CHECK(in.noise_knot(0)[0] == 0.0);
  CHECK(in.noise_knot(1)[0] == 0.25);
  CHECK(in.noise_knot(2)[0] == -0.25);
  CHECK(in.noise(0.75)[0] == doctest::Approx(0.0));
  // ||1||^2 = 2 on the grid; the first step contributes dt ||1||^2 / 3.
  CHECK(in.gap_bound() == doctest::Approx(0.5 * 2.0));
  CHECK(in.gap_squared() == doctest::Approx(0.5 * 2.0 / 3.0));
  // Independent time quadrature of ||u^dt - u~^dt||^2.
  double q = 0.0;
  for (int k = 0; k < 2; ++k) {
    q += oracle::piecewise_gauss(
        [&](double s) {
          const Field& pc = in.piecewise_constant(s);
          const Field lin = in.linear(s);
          double acc = 0.0;
          for (std::size_t i = 0; i < 4; ++i) acc += (pc[i] - lin[i]) * (pc[i] - lin[i]);
          return acc * g.cell_volume();
        },
        0.5 * k, 0.5 * (k + 1), {});
  }
  CHECK(in.gap_squared() == doctest::Approx(q).epsilon(1e-12));
  const Trajectory flat = [&] {
    Trajectory c(g, 0.5, 2);
    c.states.assign(3, Field(4, 0.3));
    c.increments.assign(2, Field(4, 0.0));
    return c;
  }();
  CHECK(Interpolants(flat).gap_squared() == 0.0);
}

TEST_CASE("discrete energy report") {
  ProblemSpec s = nonlinear_spec(false);
  const Grid g(1, 2.0, 32, Boundary::periodic);
  const JumpPath none({}, 1, s.horizon);
  s.u0 = InitialData::zero();
  const auto zero = discrete_energy_report(solve_path(s, g, 8, none), s);
  for (std::size_t n = 0; n < zero.norm2.size(); ++n) CHECK(zero.lhs(n) == 0.0);
  s.u0 = InitialData::bump(2.0, 1.0);
  const auto r = discrete_energy_report(solve_path(s, g, 8, none), s);
  CHECK(r.monotone);
  CHECK(r.bounded);
  for (std::size_t n = 0; n < r.norm2.size(); ++n) CHECK(r.lhs(n) <= r.c1 * (1 + 1e-10));
}
