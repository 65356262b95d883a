#include <benchmark/benchmark.h>

#include "symred/io.hpp"

using namespace symred;

namespace {

const Scenario& wong() {
  static const Scenario sc = scenario_library("wong", R"({"gamma_style": "full"})");
  return sc;
}

void BM_reduced_rhs(benchmark::State& state) {
  const Scenario& sc = wong();
  ReducedState s = sc.initial_reduced();
  s.x << 0.3, -0.2, 0.5;
  for (auto _ : state) {
    const ReducedState d = reduced_rhs(sc.sode, s);
    benchmark::DoNotOptimize(d.w.data());
  }
}
BENCHMARK(BM_reduced_rhs);

void BM_exponential_so3(benchmark::State& state) {
  const LieGroupSpec spec = so3_spec();
  Vec xi(3);
  xi << 0.4, -0.7, 1.1;
  for (auto _ : state) {
    const Mat g = exponential(spec, xi);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_exponential_so3);

void BM_adjoint_matrix_so3(benchmark::State& state) {
  const LieGroupSpec spec = so3_spec();
  Vec xi(3);
  xi << 0.4, -0.7, 1.1;
  const Mat g = exponential(spec, xi);
  for (auto _ : state) {
    const Mat a = adjoint_matrix(spec, g);
    benchmark::DoNotOptimize(a.data());
  }
}
BENCHMARK(BM_adjoint_matrix_so3);

void BM_christoffel_table(benchmark::State& state) {
  const Scenario& sc = wong();
  Vec x(3);
  x << 0.3, -0.2, 0.5;
  for (auto _ : state) {
    const ChristoffelTable table = christoffel_table(sc.metric, x);
    benchmark::DoNotOptimize(table.coeff.data());
  }
}
BENCHMARK(BM_christoffel_table);

void BM_integrate_reduced(benchmark::State& state) {
  const Scenario& sc = wong();
  IntegratorConfig cfg = sc.integrator;
  cfg.t_end = 0.1;
  cfg.step = 1e-3;
  for (auto _ : state) {
    const ReducedTrajectory traj = integrate_reduced(sc.sode, sc.initial_reduced(), cfg);
    benchmark::DoNotOptimize(traj.states.back().x.data());
  }
}
BENCHMARK(BM_integrate_reduced);

void BM_integrate_full(benchmark::State& state) {
  const Scenario& sc = wong();
  IntegratorConfig cfg = sc.integrator;
  cfg.t_end = 0.1;
  cfg.step = 1e-3;
  for (auto _ : state) {
    const FullTrajectory traj = integrate_full(sc.sode, sc.initial, cfg);
    benchmark::DoNotOptimize(traj.states.back().g.data());
  }
}
BENCHMARK(BM_integrate_full);

void BM_reconstruct(benchmark::State& state) {
  const Scenario& sc = wong();
  IntegratorConfig cfg = sc.integrator;
  cfg.t_end = 0.1;
  cfg.step = 1e-3;
  const ReducedTrajectory reduced = integrate_reduced(sc.sode, sc.initial_reduced(), cfg);
  for (auto _ : state) {
    const FullTrajectory full = reconstruct(sc.sode, reduced, sc.initial.g);
    benchmark::DoNotOptimize(full.states.back().g.data());
  }
}
BENCHMARK(BM_reconstruct);

}  // namespace

BENCHMARK_MAIN();
