#include "vrfb/ems.hpp"

#include <algorithm>
#include <stdexcept>

namespace vrfb {

std::string_view to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::scm: return "SCM";
    case StrategyKind::scm_rr: return "SCM_RR";
    case StrategyKind::scm_rr_wf: return "SCM_RR_WF";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view text) {
  if (text == "SCM" || text == "scm") return StrategyKind::scm;
  if (text == "SCM_RR" || text == "SCM+RR" || text == "scm_rr") return StrategyKind::scm_rr;
  if (text == "SCM_RR_WF" || text == "SCM+RR+WF" || text == "scm_rr_wf") return StrategyKind::scm_rr_wf;
  return std::nullopt;
}

std::string_view to_string(ControlMode m) {
  switch (m) {
    case ControlMode::scm: return "scm";
    case ControlMode::ramp_control: return "ramp_control";
    case ControlMode::night_charge: return "night_charge";
    case ControlMode::idle: return "idle";
  }
  return "?";
}

std::optional<ControlMode> parse_control_mode(std::string_view text) {
  for (auto m : {ControlMode::scm, ControlMode::ramp_control, ControlMode::night_charge, ControlMode::idle}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

void EmsConfig::validate(const BatteryParams& battery) const {
  ramp.validate();
  if (!(soc_target > battery.soc_min && soc_target < battery.soc_max))
    throw std::invalid_argument("ems: soc_target must lie strictly inside the battery SOC window");
  if (!(night_charge_power_w > 0.0 && night_charge_power_w <= battery.power_nominal_w))
    throw std::invalid_argument("ems: night_charge_power_w must be in (0, power_nominal_w]");
  if (charge_start < std::chrono::minutes{0} || charge_start >= std::chrono::hours{24})
    throw std::invalid_argument("ems: charge_start must be a clock time within the day");
  if (!(day_start_fraction >= 0.0)) throw std::invalid_argument("ems: day_start_fraction must be >= 0");
}

DispatchDecision scm_dispatch(double p_pv, double p_load, const BatteryState& battery, const BatteryParams& params) {
  const double surplus = p_pv - p_load;
  double command = 0.0;
  if (surplus > 0.0) {
    command = std::min(surplus, available_charge_power(params, battery));
  } else if (surplus < 0.0) {
    command = -std::min(-surplus, available_discharge_power(params, battery));
  }
  return {command, p_load + command + params.standby_power_w - p_pv,
          command == 0.0 ? ControlMode::idle : ControlMode::scm};
}

DispatchDecision rr_dispatch(const RampTick& tick, double p_pv, double p_load, const BatteryState& battery,
                             const BatteryParams& params, const RampConfig& cfg) {
  if (!tick.warmed_up || !violates(tick.rr_pct_per_min, cfg)) return scm_dispatch(p_pv, p_load, battery, params);
  const double command = std::clamp(tick.ma_command_w, -available_discharge_power(params, battery),
                                    available_charge_power(params, battery));
  return {command, p_load + command + params.standby_power_w - p_pv, ControlMode::ramp_control};
}

std::optional<double> night_charge_tick(std::chrono::minutes local_time_of_day, double soc, bool decision,
                                        bool pv_day_begun, const EmsConfig& cfg) {
  if (!decision || pv_day_begun || local_time_of_day < cfg.charge_start || soc >= cfg.soc_target)
    return std::nullopt;
  return cfg.night_charge_power_w;
}

SimulationResult simulate(const PowerSeries& pv, const PowerSeries& load, const EmsConfig& cfg,
                          const BatteryParams& battery, double initial_soc, const ChargeCalendar& calendar) {
  cfg.validate(battery);
  battery.validate();
  if (pv.start() != load.start() || pv.step() != load.step() || pv.size() != load.size())
    throw std::invalid_argument("simulate: pv and load series are not aligned");
  if (pv.step() != cfg.ramp.tick)
    throw std::invalid_argument("simulate: series step " + std::to_string(pv.step().count()) +
                                " s differs from tick " + std::to_string(cfg.ramp.tick.count()) + " s");

  const bool use_rr = cfg.strategy != StrategyKind::scm;
  const bool use_wf = cfg.strategy == StrategyKind::scm_rr_wf;
  const double dt_s = static_cast<double>(cfg.ramp.tick.count());
  const double day_threshold_w = cfg.day_start_fraction * cfg.ramp.nameplate_w;

  SimulationResult result;
  result.records.reserve(pv.size());

  BatteryState state = make_battery_state(battery, initial_soc);
  RampMonitor monitor(cfg.ramp);

  struct Night {
    std::optional<std::chrono::sys_days> day;
    bool decision = false;
    bool pv_day_begun = false;
    bool done = false;
  } night;

  for (std::size_t k = 0; k < pv.size(); ++k) {
    const Timestamp t = pv.time_at(k);
    const double p_pv = pv[k];
    const double p_load = load[k];
    const RampTick tick = monitor.update(p_pv);

    if (use_wf) {
      const auto local = t + cfg.utc_offset;
      const auto local_day = std::chrono::floor<std::chrono::days>(local);
      if (night.day != local_day) {
        night = Night{local_day, false, false, false};
        if (auto it = calendar.find(local_day); it != calendar.end()) {
          night.decision = it->second;
        } else {
          result.warnings.push_back("no forecast decision for " + format_timestamp(local_day).substr(0, 10) +
                                    "; night charge disabled");
        }
      }
      const double pv_level = tick.window_full ? tick.pv_average_w : p_pv;
      if (pv_level > day_threshold_w) night.pv_day_begun = true;
    }

    DispatchDecision decision;
    std::optional<double> night_cmd;
    if (use_wf && night.decision && !night.done) {
      const auto tod = std::chrono::duration_cast<std::chrono::minutes>(
          (t + cfg.utc_offset) - std::chrono::floor<std::chrono::days>(t + cfg.utc_offset));
      night_cmd = night_charge_tick(tod, state.soc, true, night.pv_day_begun, cfg);
      if (!night_cmd && tod >= cfg.charge_start) night.done = true;
    }
    if (night_cmd) {
      decision = {*night_cmd, p_load + *night_cmd + battery.standby_power_w - p_pv, ControlMode::night_charge};
    } else if (use_rr) {
      decision = rr_dispatch(tick, p_pv, p_load, state, battery, cfg.ramp);
    } else {
      decision = scm_dispatch(p_pv, p_load, state, battery);
    }

    const BatteryStepResult step = battery_step(battery, state, decision.battery_command_w, dt_s);
    state = step.state;

    DispatchRecord rec;
    rec.timestamp = t;
    rec.p_pv = p_pv;
    rec.p_load = p_load;
    rec.p_batt_cmd = decision.battery_command_w;
    rec.p_batt_actual = step.ac_actual_w;
    rec.p_grid = p_load + step.ac_actual_w + step.standby_w - p_pv;
    rec.soc = state.soc;
    rec.mode = decision.mode;
    rec.rr_pct_per_min = tick.rr_pct_per_min;
    rec.rr_violated = tick.violated;
    rec.rr_controlled = tick.violated && decision.mode == ControlMode::ramp_control &&
                        !violates(residual_ramp_rate(tick.ma_command_w - step.ac_actual_w, cfg.ramp), cfg.ramp);
    result.records.push_back(rec);
  }
  return result;
}

double power_balance_residual(const DispatchRecord& r, const BatteryParams& params) {
  return r.p_pv + r.p_grid - (r.p_load + r.p_batt_actual + params.standby_power_w);
}

}  // namespace vrfb
