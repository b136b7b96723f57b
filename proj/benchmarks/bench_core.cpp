#include <benchmark/benchmark.h>

#include "levylab/entropy.hpp"
#include "levylab/levy.hpp"
#include "levylab/model.hpp"
#include "levylab/solver.hpp"

using namespace levylab;

namespace {

ProblemSpec bench_spec(int dim) {
  ProblemSpec s;
  s.dim = dim;
  s.phi = Phi::porous(1.0, 1.0);
  s.flux = Flux::burgers(1.0, 10.0);
  s.epsilon = 0.05;
  s.half_width = 4.0;
  s.horizon = 0.5;
  s.u0 = InitialData::bump(1.5, 1.0);
  s.eta = NoiseAmplitude(SpatialProfile::constant(0.3), StateFactor::affine(0.2, 0.3));
  s.levy = LevyIntensity::atoms({-1.0, 1.0}, {1.0, 1.0});
  return s;
}

void BM_ImplicitStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int cells = static_cast<int>(state.range(1));
  const ProblemSpec s = bench_spec(dim);
  const Grid g(dim, s.half_width, cells, Boundary::periodic);
  const Field u0 = discretize_initial(s, g, 0.0);
  const Field noise(u0.size(), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(implicit_step(s, g, u0, noise, s.horizon / 32));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_ImplicitStep)->Args({1, 128})->Args({1, 1024})->Args({2, 32})->Args({2, 64});

void BM_SampleJumpPath(benchmark::State& state) {
  const LevyIntensity levy = LevyIntensity::atoms({-1.0, 1.0}, {state.range(0) * 0.5, state.range(0) * 0.5});
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_jump_path(levy, 1.0, seed++));
}
BENCHMARK(BM_SampleJumpPath)->Arg(2)->Arg(64)->Arg(1024);

void BM_IBeta(benchmark::State& state) {
  const double theta = 1.0 / static_cast<double>(state.range(0));
  const auto t = EntropyTriple::make_beta_theta(theta, Phi::porous(1.0, 1.0), Flux::zero());
  double a = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(I_beta(a, 1.3, t));
    a += 1e-3;
    if (a > 2.0) a = -2.0;
  }
}
BENCHMARK(BM_IBeta)->Arg(1)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
