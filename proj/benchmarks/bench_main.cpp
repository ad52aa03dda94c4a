#include "hyperctl/analysis.hpp"
#include "hyperctl/control.hpp"
#include "hyperctl/riemann.hpp"
#include "hyperctl/wave_curves.hpp"

#include <benchmark/benchmark.h>

using namespace hyperctl;

namespace {

State st(double a, double b) { return (State(2) << a, b).finished(); }

FluxModel gas() { return FluxModel::gas(1.0, 2.0, st(1.0, 0.0)); }

void BM_ShockCurve(benchmark::State& state) {
  const FluxModel m = gas();
  for (auto _ : state) benchmark::DoNotOptimize(shock_curve(m, st(1.0, 0.0), 0, -0.1));
}
BENCHMARK(BM_ShockCurve);

void BM_RiemannGas(benchmark::State& state) {
  const FluxModel m = gas();
  const State ul = st(1.0, 0.0);
  const State ur = compose_waves(m, ul, (Vector(2) << -0.15, 0.08).finished(), 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_riemann(m, ul, ur));
}
BENCHMARK(BM_RiemannGas);

void BM_RiemannCustom(benchmark::State& state) {
  const FluxModel g = gas();
  const FluxModel m = FluxModel::custom(2, [&](const State& u) { return g.flux(u); }, st(1.0, 0.0));
  const State ul = st(1.0, 0.0);
  const State ur = st(1.03, -0.02);
  for (auto _ : state) benchmark::DoNotOptimize(solve_riemann(m, ul, ur));
}
BENCHMARK(BM_RiemannCustom);

void BM_DenseShockTracking(benchmark::State& state) {
  const FluxModel m = gas();
  const int n = static_cast<int>(state.range(0));
  const Profile p = dense_shock_initial_data(m, {0, 3}, n, 0.05, {2.5, 2.53}, st(1.0, 0.0), 0);
  for (auto _ : state) {
    Simulation sim(m, {0, 3}, p);
    sim.advance_to(2.0);
    benchmark::DoNotOptimize(sim.interactions().size());
  }
}
BENCHMARK(BM_DenseShockTracking)->Arg(7)->Arg(31)->Arg(127)->Unit(benchmark::kMillisecond);

void BM_RarefactionTracking(benchmark::State& state) {
  const FluxModel m = gas();
  const Profile p{{0, 1}, {0.3, 0.5, 0.7}, {st(1.0, 0.0), st(1.04, 0.03), st(0.98, -0.02), st(1.02, 0.01)}};
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    Simulation sim(m, {0, 1}, p, {.epsilon = eps});
    sim.advance_to(2.0);
    benchmark::DoNotOptimize(sim.event_count());
  }
}
BENCHMARK(BM_RarefactionTracking)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Stabilize(benchmark::State& state) {
  const FluxModel m = gas();
  const Box box{st(0.8, -0.15), st(1.2, 0.15)};
  const double tau = crossing_time(m, {0, 1}, box);
  const Profile p = dense_shock_initial_data(m, {0, 1}, 31, 0.05, {0, 1}, st(1.0, 0.0), 0);
  for (auto _ : state) benchmark::DoNotOptimize(stabilize(m, {0, 1}, tau, p, st(1.0, 0.0)).record.rows.size());
}
BENCHMARK(BM_Stabilize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
