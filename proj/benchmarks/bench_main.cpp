#include <benchmark/benchmark.h>

#include <cmath>

#include "holderlab/lab.hpp"

using namespace holderlab;

namespace {

void BM_SharpExponents(benchmark::State& state) {
  const auto tuples = admissible_sweep(EquationClass::PParabolic, 256, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& t = tuples[i++ % tuples.size()];
    benchmark::DoNotOptimize(sharp_exponents(t.params, SourceIntegrability::of(t.q, t.r)));
  }
}
BENCHMARK(BM_SharpExponents);

void BM_AdmissibleSweep(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(admissible_sweep(EquationClass::PME, static_cast<int>(state.range(0)), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdmissibleSweep)->Arg(1000);

// One stored level of the explicit solver; the nodes per level scale with the argument.
void BM_SolverLevel(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto init = Expression::barenblatt(2, 1, 1.0);
  const auto grid = GridSpec::line({-6, 6}, nx, {1, 1.01}, 2);
  for (auto _ : state) {
    SolveStats stats;
    benchmark::DoNotOptimize(
        solve(EquationParams::porous_medium(2, 1), SourceTerm::zero(), init, grid, {}, &stats));
    state.counters["steps"] = static_cast<double>(stats.steps);
  }
}
BENCHMARK(BM_SolverLevel)->Arg(257)->Arg(513)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_OscillationProfile(benchmark::State& state) {
  const auto u = sample([](const SpaceTimePoint& p) { return std::pow(std::abs(p.x), 0.75); },
                        GridSpec::line({-1, 1}, 1025, {0, 0.25}, 1025));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oscillation_profile(u, {0, 0, 0.25}, 2.0, 0.5, 5, 2.0, 0.5));
  }
}
BENCHMARK(BM_OscillationProfile)->Unit(benchmark::kMillisecond);

void BM_LqrNorm(benchmark::State& state) {
  const auto u = sample([](const SpaceTimePoint& p) { return std::sin(3 * p.x) * std::exp(p.t); },
                        GridSpec::line({-1, 1}, 801, {-1, 0}, 401));
  const Region g1 = Region::ball(0, 0, 1, {-1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(lqr_norm(u, g1, 3.0, 2.0));
}
BENCHMARK(BM_LqrNorm)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
