#include <random>

#include <benchmark/benchmark.h>

#include "impulse/limit_approx.hpp"
#include "impulse/scenarios.hpp"

using namespace impulse;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void approximate_sequence_sweep(benchmark::State& state) {
  const Scenario sc = find_scenario("brockett-v2-jump");
  const auto grid = uniform_grid(sc.horizon, 101);
  CompletionOptions options;
  options.sample_times = grid;
  const GraphCompletion gc = complete_graph(*sc.u, *sc.v, sc.U, sc.fibers, options);
  const std::vector<int> ks{16, 32, 64, 128, 256, 512, 1024, 2048};
  for (auto _ : state)
    benchmark::DoNotOptimize(approximate_sequence(sc.fields, sc.x0, gc, *sc.u, *sc.v, ks, grid, {}, mode(state)));
}

void growth_check(benchmark::State& state) {
  const Scenario sc = find_scenario("example-2.1");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<GrowthSample> samples(200000);
  for (auto& s : samples) {
    s.x = Vec::NullaryExpr(4, [&] { return normal(rng); });
    s.u = Vec::NullaryExpr(2, [&] { return normal(rng); });
    s.v = Vec::NullaryExpr(1, [&] { return normal(rng); });
  }
  for (auto _ : state) benchmark::DoNotOptimize(check_growth_bound(sc.fields, samples, mode(state)));
}

void sup_distance_grid(benchmark::State& state) {
  const std::size_t n = 1000000;
  const auto grid = uniform_grid(1.0, n);
  Trajectory a{grid, Mat::Random(8, static_cast<Eigen::Index>(n)), {}};
  Trajectory b{grid, Mat::Random(8, static_cast<Eigen::Index>(n)), {}};
  for (auto _ : state) benchmark::DoNotOptimize(sup_distance(a, b, grid, mode(state)));
}

}  // namespace

BENCHMARK(approximate_sequence_sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(growth_check)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(sup_distance_grid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
