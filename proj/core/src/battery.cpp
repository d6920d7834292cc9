#include "vrfb/battery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrfb {

namespace {

constexpr double kSecondsPerHour = 3600.0;

double taper(const BatteryParams& p, double distance_to_limit) {
  if (distance_to_limit <= 0.0) return 0.0;
  if (p.derate_band <= 0.0 || distance_to_limit >= p.derate_band) return p.power_nominal_w;
  return p.power_nominal_w * (distance_to_limit / p.derate_band);
}

}  // namespace

void BatteryParams::validate() const {
  if (!(energy_capacity_wh > 0.0) || !std::isfinite(energy_capacity_wh))
    throw std::invalid_argument("battery: energy_capacity_wh must be positive and finite");
  if (!(power_nominal_w > 0.0)) throw std::invalid_argument("battery: power_nominal_w must be positive");
  if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0))
    throw std::invalid_argument("battery: require 0 <= soc_min < soc_max <= 1");
  if (!(eta_acdc > 0.0 && eta_acdc <= 1.0)) throw std::invalid_argument("battery: eta_acdc must be in (0, 1]");
  if (!(standby_power_w >= 0.0) || !std::isfinite(standby_power_w))
    throw std::invalid_argument("battery: standby_power_w must be >= 0");
  if (!(derate_band >= 0.0 && derate_band < (soc_max - soc_min) / 2.0))
    throw std::invalid_argument("battery: derate_band must be in [0, (soc_max - soc_min) / 2)");
}

BatteryState make_battery_state(const BatteryParams& params, double soc) {
  if (!(soc >= params.soc_min && soc <= params.soc_max))
    throw std::invalid_argument("battery: initial SOC outside [soc_min, soc_max]");
  return BatteryState{soc, BatteryMode::idle};
}

double available_charge_power(const BatteryParams& params, const BatteryState& state) {
  return taper(params, params.soc_max - state.soc);
}

double available_discharge_power(const BatteryParams& params, const BatteryState& state) {
  return taper(params, state.soc - params.soc_min);
}

BatteryStepResult battery_step(const BatteryParams& params, const BatteryState& state, double ac_command_w,
                               double dt_s) {
  BatteryStepResult out;
  out.standby_w = params.standby_power_w;

  const double dt_h = dt_s / kSecondsPerHour;
  double ac = std::clamp(ac_command_w, -available_discharge_power(params, state),
                         available_charge_power(params, state));
  double soc = state.soc;

  if (ac > 0.0) {
    const double headroom_wh = (params.soc_max - soc) * params.energy_capacity_wh;
    const double stored_wh = ac * params.eta_acdc * dt_h;
    if (stored_wh >= headroom_wh) {
      ac = headroom_wh / (params.eta_acdc * dt_h);
      soc = params.soc_max;
    } else {
      soc += stored_wh / params.energy_capacity_wh;
    }
  } else if (ac < 0.0) {
    const double reserve_wh = (soc - params.soc_min) * params.energy_capacity_wh;
    const double drawn_wh = (-ac / params.eta_acdc) * dt_h;
    if (drawn_wh >= reserve_wh) {
      ac = -reserve_wh * params.eta_acdc / dt_h;
      soc = params.soc_min;
    } else {
      soc -= drawn_wh / params.energy_capacity_wh;
    }
  }
  soc = std::clamp(soc, params.soc_min, params.soc_max);

  out.ac_actual_w = ac;
  out.state.soc = soc;
  out.state.mode = ac > 0.0 ? BatteryMode::charging : ac < 0.0 ? BatteryMode::discharging : BatteryMode::idle;
  return out;
}

}  // namespace vrfb
