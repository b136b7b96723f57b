#include <cmath>
#include <sstream>

#include "doctest.h"
#include "levylab/errors.hpp"
#include "levylab/levy.hpp"

using namespace levylab;

namespace {

ProblemSpec atom_spec(double g, double lambda) {
  ProblemSpec s;
  s.eta = NoiseAmplitude(SpatialProfile::constant(g), StateFactor::linear(lambda));
  s.levy = LevyIntensity::atoms({-1.0, 2.0}, {1.0, 0.5});
  s.half_width = 2.0;
  return s;
}

}  // namespace

TEST_CASE("jump paths are reproducible and sorted") {
  const auto m = LevyIntensity::atoms({-1.0, 1.0}, {3.0, 3.0});
  const JumpPath a = sample_jump_path(m, 2.0, 77), b = sample_jump_path(m, 2.0, 77);
  REQUIRE(a.events().size() == b.events().size());
  for (std::size_t i = 0; i < a.events().size(); ++i) {
    CHECK(a.events()[i].time == b.events()[i].time);
    CHECK(a.events()[i].mark.size == b.events()[i].mark.size);
    CHECK(a.events()[i].time >= 0.0);
    CHECK(a.events()[i].time < 2.0);
    if (i) CHECK(a.events()[i - 1].time <= a.events()[i].time);
  }
  const JumpPath c = sample_jump_path(m, 2.0, 78);
  CHECK((c.events().size() != a.events().size() ||
         c.events().front().time != a.events().front().time));
  CHECK(path_seed(10, 3) == (10u ^ 3u));
}

TEST_CASE("event counts are Poisson with mean m(E) T") {
  const auto m = LevyIntensity::atoms({1.0}, {2.5});
  const int n = 4000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += sample_jump_path(m, 2.0, path_seed(5, k)).events().size();
  CHECK(std::abs(s / n - 5.0) <= 4.0 * std::sqrt(5.0 / n));
  CHECK(sample_jump_path(LevyIntensity::none(), 1.0, 1).events().empty());
}

TEST_CASE("windows partition the events, the last one is closed") {
  std::vector<JumpEvent> ev{{0.0, {0, 1}}, {0.25, {0, 1}}, {0.5, {0, -1}}, {1.0, {0, 1}}};
  const JumpPath p(ev, 1, 1.0);
  CHECK(p.window(0.0, 0.25).size() == 1u);
  CHECK(p.window(0.25, 0.5).size() == 1u);
  CHECK(p.window(0.5, 1.0).size() == 2u);
  std::size_t total = 0;
  for (int k = 0; k < 8; ++k) total += p.window(k / 8.0, (k + 1) / 8.0).size();
  CHECK(total == 4u);
  CHECK_THROWS(p.window(0.5, 0.25));
}

TEST_CASE("compensated increment examples") {
  const Grid grid(1, 2.0, 8, Boundary::periodic);
  Field u(8);
  for (int i = 0; i < 8; ++i) u[i] = 0.1 * i;
  ProblemSpec quiet = atom_spec(0.5, 2.0);
  quiet.eta = NoiseAmplitude();
  const JumpPath one({{0.3, {0.0, 2.0}}}, 1, 1.0);
  for (double v : compensated_increment(one, quiet, grid, u, 0.0, 1.0)) CHECK(v == 0.0);

  const ProblemSpec s = atom_spec(0.5, 2.0);
  const double first = -1.0 * 1.0 + 2.0 * 0.5;  // int v m(dz)
  const JumpPath empty({}, 1, 1.0);
  const Field none = compensated_increment(empty, s, grid, u, 0.2, 0.45);
  const Field with = compensated_increment(one, s, grid, u, 0.2, 0.45);
  for (int i = 0; i < 8; ++i) {
    const double gs = 0.5 * 2.0 * u[i];
    CHECK(none[i] == doctest::Approx(-0.25 * gs * first));
    CHECK(with[i] == doctest::Approx(gs * (2.0 - 0.25 * first)));
  }
}

TEST_CASE("compensated increments have mean zero and the isometry variance") {
  const Grid grid(1, 2.0, 4, Boundary::periodic);
  const Field u{1.0, 1.0, 1.0, 1.0};
  const ProblemSpec s = atom_spec(0.5, 1.0);
  const int n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const JumpPath p = sample_jump_path(s.levy, 1.0, path_seed(31, k));
    const double x = compensated_increment(p, s, grid, u, 0.0, 1.0)[0];
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n, var = sum2 / n - mean * mean;
  // Var = T g^2 sigma^2 int v^2 m(dz) = 0.25 (1 + 4 * 0.5).
  const double expected = 0.25 * 3.0;
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(expected / n));
  CHECK(var == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("jump entropy terms match closed forms") {
  const Phi phi = Phi::linear(1.0);
  const std::vector<EntropyTriple> triples = {
      EntropyTriple::make_beta_theta(0.3, phi, Flux::zero()),
      EntropyTriple::make_beta_theta(2.0, phi, Flux::zero()),
      EntropyTriple::make_h_delta(4, 0.7, phi, Flux::zero()),
      EntropyTriple::make_quadratic(phi, Flux::zero())};
  for (const auto& t : triples) {
    for (double u : {-1.2, -0.1, 0.0, 0.25, 2.0}) {
      for (double eta : {-1.5, -0.2, 0.05, 0.4, 3.0}) {
        const double inc = t.beta(u + eta) - t.beta(u);
        CHECK(jump_entropy_increment(t, u, eta) == doctest::Approx(inc).epsilon(1e-12).scale(1.0));
        CHECK(jump_entropy_correction(t, u, eta) ==
              doctest::Approx(inc - eta * t.beta_prime(u)).epsilon(1e-12).scale(1.0));
      }
    }
    CHECK(jump_entropy_increment(t, 0.4, 0.0) == 0.0);
  }
}

TEST_CASE("martingale term along a hand-made trajectory") {
  const Grid grid(1, 2.0, 8, Boundary::periodic);
  ProblemSpec s = atom_spec(0.5, 1.0);
  const auto triple = EntropyTriple::make_quadratic(Phi::linear(1.0), Flux::zero());
  const TestFunction psi(TimeFactor::one(), SpaceFactor::bump({0.0, 0.0}, 1.5));
  Trajectory traj(grid, 0.25, 4);
  Field u(8);
  for (int i = 0; i < 8; ++i) u[i] = 0.2 * (i - 3);
  traj.states.assign(5, u);
  const JumpPath path({{0.6, {0.0, 2.0}}}, 1, 1.0);

  // beta = r^2 / 2: a jump adds eta u + eta^2 / 2, the compensator removes
  // T int (eta u + eta^2 / 2) m(dz) and the correction is T int eta^2 / 2 m(dz).
  double jumps = 0.0, comp = 0.0, corr = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double b = psi.space().value(grid.center(i), 1) * grid.cell_volume();
    const double gs = 0.5 * u[i];
    const double eta = gs * 2.0;
    jumps += b * (eta * u[i] + 0.5 * eta * eta);
    for (auto [v, m] : {std::pair{-1.0, 1.0}, std::pair{2.0, 0.5}}) {
      comp -= b * m * (gs * v * u[i] + 0.5 * gs * gs * v * v);
      corr += b * m * 0.5 * gs * gs * v * v;
    }
  }
  const auto parts = martingale_parts(path, s, traj, triple, psi);
  CHECK(parts.jumps == doctest::Approx(jumps).epsilon(1e-13));
  CHECK(parts.compensator == doctest::Approx(comp).epsilon(1e-13));
  CHECK(parts.correction == doctest::Approx(corr).epsilon(1e-13));
  CHECK(martingale_term(path, s, traj, triple, psi) == doctest::Approx(jumps + comp));

  s.eta = NoiseAmplitude();
  CHECK(martingale_term(path, s, traj, triple, psi) == 0.0);
}

TEST_CASE("paths survive refinement and a text round trip bit for bit") {
  const auto m = LevyIntensity::uniform_sizes(-1.0, 2.0, 1.5).with_uniform_position(-1, 1, 1);
  const JumpPath p = sample_jump_path(m, 0.7, 4242);
  const JumpPath r = refine_path(p, 128);
  CHECK(r.events().size() == p.events().size());
  std::stringstream buf;
  write_path(buf, p);
  const JumpPath q = read_path(buf, p.seed(), p.horizon());
  REQUIRE(q.events().size() == p.events().size());
  for (std::size_t i = 0; i < p.events().size(); ++i) {
    CHECK(q.events()[i].time == p.events()[i].time);
    CHECK(q.events()[i].mark.position == p.events()[i].mark.position);
    CHECK(q.events()[i].mark.size == p.events()[i].mark.size);
  }
  std::istringstream bad("0.1 0 x\n");
  CHECK_THROWS(read_path(bad, 1, 1.0));
  std::istringstream late("2.0 0 1\n");
  CHECK_THROWS(read_path(late, 1, 1.0));
}
