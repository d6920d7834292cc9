#pragma once

namespace vrfb {

/// Energy/efficiency model parameters for the flow battery. Power limits are
/// on the AC side of the integrated inverter.
struct BatteryParams {
  double energy_capacity_wh = 60'000.0;
  double power_nominal_w = 5'000.0;
  double soc_min = 0.20;
  double soc_max = 0.70;
  double eta_acdc = 0.88;  // per conversion direction
  double standby_power_w = 30.0;
  /// Width in SOC units of the band next to each limit in which the
  /// available power tapers linearly to zero.
  double derate_band = 0.05;

  /// Throws std::invalid_argument on violated invariants. power_nominal_w
  /// may be +infinity.
  void validate() const;
};

enum class BatteryMode { idle, charging, discharging };

struct BatteryState {
  double soc = 0.35;
  BatteryMode mode = BatteryMode::idle;

  friend bool operator==(const BatteryState&, const BatteryState&) = default;
};

struct BatteryStepResult {
  BatteryState state;
  double ac_actual_w = 0.0;  // + charge, - discharge
  double standby_w = 0.0;    // drawn from the AC bus, outside ac_actual_w
};

/// Validates soc against the window and returns an idle state.
BatteryState make_battery_state(const BatteryParams& params, double soc);

double available_charge_power(const BatteryParams& params, const BatteryState& state);
double available_discharge_power(const BatteryParams& params, const BatteryState& state);

/// Applies an AC power command for dt_s seconds. Commands are clamped to the
/// available power and to the SOC window; never throws for any command.
BatteryStepResult battery_step(const BatteryParams& params, const BatteryState& state, double ac_command_w,
                               double dt_s);

}  // namespace vrfb
