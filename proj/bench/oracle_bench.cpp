// Serial reference runner against the OpenMP-sharded one, per oracle suite.
#include <benchmark/benchmark.h>

#include "clarith/oracle.hpp"

namespace {

using clarith::oracle::find_suite;

void run(benchmark::State& state, const char* name, bool parallel) {
  const auto* s = find_suite(name);
  if (!s) {
    state.SkipWithError("unknown suite");
    return;
  }
  const auto cases = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = parallel ? clarith::oracle::run_parallel(*s, cases) : clarith::oracle::run_serial(*s, cases);
    if (!r.ok()) state.SkipWithError("suite failed");
    benchmark::DoNotOptimize(r.cases);
  }
  state.counters["cases"] = static_cast<double>(cases);
}

}  // namespace

BENCHMARK_CAPTURE(run, fetch_serial, "fetch", false)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, fetch_parallel, "fetch", true)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, sim_serial, "sim", false)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, sim_parallel, "sim", true)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, sketch_serial, "sketch", false)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, sketch_parallel, "sketch", true)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, counter_serial, "counter", false)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run, counter_parallel, "counter", true)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
