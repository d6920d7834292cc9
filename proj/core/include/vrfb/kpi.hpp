#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vrfb/ems.hpp"

namespace vrfb {

/// Directional energy totals of a dispatch trace, in watt-hours.
struct EnergyTotals {
  double e_pv_generated = 0.0;
  double e_pv_consumed = 0.0;  // direct use plus PV routed into the battery
  double e_load = 0.0;
  double e_from_grid = 0.0;
  double e_to_grid = 0.0;
  double e_grid_total = 0.0;
  double e_to_battery = 0.0;
  double e_from_battery = 0.0;
  double e_battery_total = 0.0;
  double e_standby = 0.0;
  std::size_t n_ramps_original = 0;
  std::size_t n_ramps_controlled = 0;

  /// Inflows minus outflows: standby draw plus rounding. Never negative for a
  /// balanced trace.
  double losses() const {
    return e_pv_generated + e_from_grid + e_from_battery - (e_load + e_to_grid + e_to_battery);
  }
};

/// A ratio, or an explicit undefined marker with the reason.
struct KpiValue {
  std::optional<double> value;
  std::string reason;

  bool defined() const { return value.has_value(); }
  double percent() const { return *value * 100.0; }
};

struct KpiReport {
  KpiValue scr, ssr, grf, bcr, eg, fgu, tgu, fbu, tbu, crr;
  bool crr_no_violations = false;
  EnergyTotals totals;
  std::vector<std::string> notes;

  /// (abbreviation, value) pairs in display order.
  std::array<std::pair<std::string_view, const KpiValue*>, 10> entries() const;
};

/// Rectangle-rule integration of a trace sampled every tick_s seconds.
/// Throws std::invalid_argument for an empty trace.
EnergyTotals accumulate(std::span<const DispatchRecord> trace, double tick_s);

KpiReport compute_kpis(const EnergyTotals& totals);

/// JSON document: "kpis" (percent or null), "undefined" (reasons),
/// "flags", "totals" and "notes".
std::string kpi_report_json(const KpiReport& report);

}  // namespace vrfb
