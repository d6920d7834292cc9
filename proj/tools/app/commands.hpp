#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "vrfb/kpi.hpp"
#include "vrfb/ramp.hpp"

namespace vrfb::app {

struct Console {
  std::ostream& out;
  std::ostream& err;
};

/// PV and load on the common tick grid.
struct PreparedInputs {
  PowerSeries pv;
  PowerSeries load;
};

PreparedInputs prepare_inputs(const RunConfig& config);

/// Night-charge verdicts for every local date the series touch. Missing
/// dates are left out (the simulator then defaults to no charge).
ChargeCalendar build_charge_calendar(const RunConfig& config, const PowerSeries& pv,
                                     std::vector<std::string>& warnings);

struct StrategyRun {
  StrategyKind strategy;
  SimulationResult simulation;
  KpiReport kpis;
};

StrategyRun run_strategy(const RunConfig& config, const PreparedInputs& inputs, const ChargeCalendar& calendar,
                         StrategyKind strategy);

void write_trace_csv(std::ostream& out, std::span<const DispatchRecord> trace);
void write_histogram_csv(std::ostream& out, const RampHistogram& h);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_compare_csv(std::ostream& out, std::span<const StrategyRun> runs);
void print_kpi_table(std::ostream& out, std::span<const StrategyRun> runs);

/// Each returns the process exit status; errors are reported on console.err.
int run_simulation(const RunConfig& config, Console console);
int run_ramp_analysis(const std::filesystem::path& pv_path, PowerUnit unit, const RampConfig& cfg,
                      std::vector<Seconds> windows, const std::filesystem::path& histogram_csv,
                      const std::filesystem::path& sweep_csv, Console console);
int compare_strategies(const RunConfig& config, std::vector<StrategyKind> strategies, Console console);
int forecast_check(const RunConfig& config, std::optional<Date> date, Console console);

}  // namespace vrfb::app
