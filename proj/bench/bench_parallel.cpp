// Serial vs OpenMP stepping of the differentiator bank, and serial vs
// parallel batches of scenarios.
#include <benchmark/benchmark.h>

#include <cmath>

#include "kinfault/config.hpp"
#include "kinfault/parallel.hpp"
#include "kinfault/pipeline.hpp"

using namespace kinfault;

namespace {

ChannelArray inputs_at(long k) {
  const double t = 0.01 * static_cast<double>(k);
  ChannelArray in{};
  for (std::size_t c = 0; c < kChannelCount; ++c) in[c] = std::sin(2.0 * t + 0.3 * static_cast<double>(c));
  return in;
}

void bank_steps(benchmark::State& state, bool parallel) {
  const long steps = state.range(0);
  for (auto _ : state) {
    DifferentiatorBank bank(default_single_settings(), default_double_settings(), 0.01);
    double sink = 0.0;
    for (long k = 1; k <= steps; ++k) sink += bank.step(inputs_at(k), parallel)[0];
    benchmark::DoNotOptimize(sink);
  }
  state.SetItemsProcessed(state.iterations() * steps);
}

void BM_BankSerial(benchmark::State& s) { bank_steps(s, false); }
void BM_BankParallel(benchmark::State& s) { bank_steps(s, true); }

void batch(benchmark::State& state, bool parallel) {
  std::vector<Scenario> scenarios;
  for (int i = 0; i < state.range(0); ++i) {
    Scenario sc = preset("healthy");
    sc.seed = static_cast<std::uint64_t>(i + 1);
    sc.trajectory.k_last = 1500;
    scenarios.push_back(sc);
  }
  for (auto _ : state) {
    auto runs = run_batch(scenarios, parallel);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchSerial(benchmark::State& s) { batch(s, false); }
void BM_BatchParallel(benchmark::State& s) { batch(s, true); }

}  // namespace

BENCHMARK(BM_BankSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BankParallel)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchSerial)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
