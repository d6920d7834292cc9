#include <benchmark/benchmark.h>

#include <random>

#include "app/fixtures.hpp"
#include "vrfb/ems.hpp"
#include "vrfb/ramp.hpp"

using namespace vrfb;
using namespace std::chrono_literals;

namespace {

void BM_SimulateDay(benchmark::State& state) {
  const auto pv = app::make_fluctuating_pv(app::kFixtureFirstDay, 1, 2s);
  const auto load = resample(app::make_load_profile(app::kFixtureFirstDay, 1), 2s, {});
  const PowerSeries day_load{load.start(), 2s, std::vector<double>(load.values().begin(), load.values().begin() + 43200)};
  EmsConfig cfg;
  cfg.strategy = static_cast<StrategyKind>(state.range(0));
  ChargeCalendar cal{{std::chrono::sys_days{app::kFixtureFirstDay}, true}};
  for (auto _ : state) {
    auto r = simulate(pv, day_load, cfg, BatteryParams{}, 0.35, cal);
    benchmark::DoNotOptimize(r.records.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pv.size()));
}
BENCHMARK(BM_SimulateDay)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MaCommand(benchmark::State& state) {
  RampConfig cfg;
  cfg.window = Seconds{state.range(0)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 7000.0);
  std::vector<double> w(cfg.window_samples());
  for (auto& v : w) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ma_command(w, w.back(), cfg));
}
BENCHMARK(BM_MaCommand)->Arg(20)->Arg(300)->Arg(900);

void BM_Resample(benchmark::State& state) {
  const auto load = app::make_load_profile(app::kFixtureFirstDay, 7);
  for (auto _ : state) benchmark::DoNotOptimize(resample(load, 2s, {}));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

void BM_WindowSweep(benchmark::State& state) {
  const auto pv = app::make_fluctuating_pv(app::kFixtureFirstDay, 1, 2s);
  const std::vector<Seconds> windows{20s, 60s, 300s, 900s};
  for (auto _ : state) benchmark::DoNotOptimize(window_sweep(pv, RampConfig{}, windows));
}
BENCHMARK(BM_WindowSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
