// Serial reference driver against the OpenMP driver on the same restart set.

#include "qcap/optimize.hpp"

#include <benchmark/benchmark.h>

namespace {

qcap::OptimizerConfig config(qcap::Exec exec, int restarts) {
  qcap::OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 7;
  cfg.exec = exec;
  return cfg;
}

void one_shot(benchmark::State& state, qcap::Exec exec) {
  const auto ch = qcap::zoo::dephrasure(0.11, 0.33);
  const auto cfg = config(exec, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = qcap::maximize(qcap::MeasureKind::coherent, ch, 1, cfg);
    benchmark::DoNotOptimize(r.best_value.value);
  }
  state.counters["threads"] = exec == qcap::Exec::parallel ? qcap::configured_threads() : 1;
}

void two_shot(benchmark::State& state, qcap::Exec exec) {
  const auto ch = qcap::zoo::dephrasure(0.11, 0.33);
  const auto cfg = config(exec, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = qcap::maximize(qcap::MeasureKind::coherent, ch, 2, cfg);
    benchmark::DoNotOptimize(r.best_value.value);
  }
}

void scan_grid(benchmark::State& state, qcap::Exec exec) {
  std::vector<std::vector<double>> grid;
  for (int i = 0; i < state.range(0); ++i) {
    const double p = 0.02 + 0.02 * i;
    grid.push_back({p, 3 * p});
  }
  auto cfg = config(exec, 4);
  for (auto _ : state) {
    auto rows = qcap::scan("dephrasure", grid, cfg);
    benchmark::DoNotOptimize(rows.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(one_shot, serial, qcap::Exec::serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(one_shot, parallel, qcap::Exec::parallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(two_shot, serial, qcap::Exec::serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(two_shot, parallel, qcap::Exec::parallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(scan_grid, serial, qcap::Exec::serial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(scan_grid, parallel, qcap::Exec::parallel)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
