#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vrfb/battery.hpp"
#include "vrfb/ramp.hpp"
#include "vrfb/timeseries.hpp"

namespace vrfb {

enum class StrategyKind { scm, scm_rr, scm_rr_wf };

std::string_view to_string(StrategyKind s);
/// Accepts SCM, SCM_RR, SCM_RR_WF and the `+`-joined spellings.
std::optional<StrategyKind> parse_strategy(std::string_view text);

struct EmsConfig {
  StrategyKind strategy = StrategyKind::scm_rr_wf;
  RampConfig ramp;
  double night_charge_power_w = 2'700.0;
  double soc_target = 0.50;
  std::chrono::minutes charge_start{90};  // local clock, 01:30
  std::chrono::minutes utc_offset{0};
  /// Averaged PV above this fraction of nameplate ends the night.
  double day_start_fraction = 0.01;

  void validate(const BatteryParams& battery) const;
};

enum class ControlMode { scm, ramp_control, night_charge, idle };
std::string_view to_string(ControlMode m);
std::optional<ControlMode> parse_control_mode(std::string_view text);

struct DispatchRecord {
  Timestamp timestamp;
  double p_pv = 0.0;
  double p_load = 0.0;
  double p_batt_cmd = 0.0;     // charge-positive
  double p_batt_actual = 0.0;  // charge-positive, AC side
  double p_grid = 0.0;         // import-positive
  double soc = 0.0;
  ControlMode mode = ControlMode::idle;
  double rr_pct_per_min = 0.0;
  bool rr_violated = false;
  bool rr_controlled = false;

  friend bool operator==(const DispatchRecord&, const DispatchRecord&) = default;
};

struct DispatchDecision {
  double battery_command_w = 0.0;
  double grid_w = 0.0;
  ControlMode mode = ControlMode::idle;
};

/// Surplus goes to the battery, deficit comes from it, the grid takes the
/// rest. grid_w assumes the command is delivered and includes standby.
DispatchDecision scm_dispatch(double p_pv, double p_load, const BatteryState& battery, const BatteryParams& params);

/// Ramp-control dispatch for one tick. Falls back to scm_dispatch before the
/// window is warm and on non-violating ticks.
DispatchDecision rr_dispatch(const RampTick& tick, double p_pv, double p_load, const BatteryState& battery,
                             const BatteryParams& params, const RampConfig& cfg);

/// Grid-sourced charge command while the night-charge conditions hold.
std::optional<double> night_charge_tick(std::chrono::minutes local_time_of_day, double soc, bool decision,
                                        bool pv_day_begun, const EmsConfig& cfg);

/// Night-charge verdict per local calendar day.
using ChargeCalendar = std::map<std::chrono::sys_days, bool>;

struct SimulationResult {
  std::vector<DispatchRecord> records;
  std::vector<std::string> warnings;
};

/// Deterministic tick loop. pv and load must share start, step (== tick) and
/// length.
SimulationResult simulate(const PowerSeries& pv, const PowerSeries& load, const EmsConfig& cfg,
                          const BatteryParams& battery, double initial_soc, const ChargeCalendar& calendar = {});

/// p_pv + p_grid - (p_load + p_batt_actual + standby).
double power_balance_residual(const DispatchRecord& r, const BatteryParams& params);

}  // namespace vrfb
