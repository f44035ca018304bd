#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "bresse/discretize.hpp"
#include "bresse/evolve.hpp"
#include "bresse/spectral.hpp"

namespace {

bresse::BeamParameters params() {
  bresse::BeamParameters p;
  p.rho1 = 1.0;
  p.rho2 = 2.0;
  p.kappa = 1.0;
  p.kappa0 = 1.5;
  p.b = 3.0;
  p.l = 1.0;
  p.L = 1.0;
  return p;
}

bresse::DampingProfile profile() {
  bresse::DampingProfile d;
  d.alpha = 0.25;
  d.beta = 0.75;
  d.a0 = 1.0;
  return d;
}

bresse::BoundaryCondition bc_of(const benchmark::State& state) {
  return state.range(1) == 0 ? bresse::BoundaryCondition::DDD : bresse::BoundaryCondition::DNN;
}

void BM_Assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bresse::assemble(params(), profile(), bc_of(state), n));
  }
}
BENCHMARK(BM_Assemble)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_CayleyStep(benchmark::State& state) {
  const auto sys = bresse::assemble(params(), profile(), bc_of(state), static_cast<int>(state.range(0)));
  const bresse::CayleyStepper stepper(sys, bresse::default_time_step(sys));
  Eigen::VectorXd U = bresse::make_initial(sys, bresse::RandomSmoothInit{1, 0.1});
  for (auto _ : state) {
    U = stepper.step(U);
    benchmark::DoNotOptimize(U.data());
  }
  state.SetLabel(stepper.uses_sparse_solver() ? "sparse" : "dense");
}
BENCHMARK(BM_CayleyStep)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_ResolventSetup(benchmark::State& state) {
  const auto sys = bresse::assemble(params(), profile(), bc_of(state), static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bresse::ResolventEvaluator(sys));
  }
}
BENCHMARK(BM_ResolventSetup)->ArgsProduct({{50, 100}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ResolventNorm(benchmark::State& state) {
  const auto sys = bresse::assemble(params(), profile(), bc_of(state), static_cast<int>(state.range(0)));
  const bresse::ResolventEvaluator eval(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.norm(10.37));
  }
}
BENCHMARK(BM_ResolventNorm)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
