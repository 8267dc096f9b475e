// OpenMP kernels against their serial references.
// Set OMP_NUM_THREADS to vary the parallel runs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "tstab/signal.hpp"
#include "tstab/signal_reference.hpp"
#include "tstab/tuning.hpp"

namespace {

std::vector<double> noisy_series(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1e-3);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.3 * std::sin(i / 250.0) + g(rng);
  return x;
}

void BM_SgFilter(benchmark::State& state) {
  const auto x = noisy_series(static_cast<std::size_t>(state.range(0)));
  const tstab::signal::SgSpec spec{31, 3};
  for (auto _ : state) benchmark::DoNotOptimize(tstab::signal::sg_filter(x, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SgFilterReference(benchmark::State& state) {
  const auto x = noisy_series(static_cast<std::size_t>(state.range(0)));
  const tstab::signal::SgSpec spec{31, 3};
  for (auto _ : state) benchmark::DoNotOptimize(tstab::signal::reference::sg_filter(x, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_SgFilter)->Arg(4500)->Arg(45000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SgFilterReference)->Arg(4500)->Arg(45000)->Unit(benchmark::kMicrosecond);

void run_sweep(benchmark::State& state, tstab::tuning::Execution exec) {
  using namespace tstab::tuning;
  const auto suite = standard_suite(tstab::motion::AnchorConfig{}, tstab::motion::Vec3(0.25, 0.0, 0.10));
  const std::vector<GridAxis> grid{{SweepAxis::F_retain, {0.3, 0.5, 0.72, 0.9}},
                                   {SweepAxis::Window, {21, 31}}};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(grid, suite, SweepBase{}, exec));
}

void BM_SweepParallel(benchmark::State& state) { run_sweep(state, tstab::tuning::Execution::Parallel); }
void BM_SweepSerial(benchmark::State& state) { run_sweep(state, tstab::tuning::Execution::Serial); }

BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
