#include "vrfb/kpi.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace vrfb {

namespace {

KpiValue ratio(double num, double den, std::string_view what) {
  if (den > 0.0) return {num / den, {}};
  return {std::nullopt, std::string(what)};
}

}  // namespace

std::array<std::pair<std::string_view, const KpiValue*>, 10> KpiReport::entries() const {
  return {{{"SCR", &scr},
           {"SSR", &ssr},
           {"GRF", &grf},
           {"BCR", &bcr},
           {"EG", &eg},
           {"FGU", &fgu},
           {"TGU", &tgu},
           {"FBU", &fbu},
           {"TBU", &tbu},
           {"CRR", &crr}}};
}

EnergyTotals accumulate(std::span<const DispatchRecord> trace, double tick_s) {
  if (trace.empty()) throw std::invalid_argument("accumulate: empty trace");
  if (!(tick_s > 0.0)) throw std::invalid_argument("accumulate: tick must be positive");

  const double dt_h = tick_s / 3600.0;
  EnergyTotals t;
  RampEventCounter ramps;
  for (const auto& r : trace) {
    const double to_grid = std::max(-r.p_grid, 0.0);
    t.e_pv_generated += r.p_pv * dt_h;
    t.e_pv_consumed += std::max(r.p_pv - to_grid, 0.0) * dt_h;
    t.e_load += r.p_load * dt_h;
    t.e_from_grid += std::max(r.p_grid, 0.0) * dt_h;
    t.e_to_grid += to_grid * dt_h;
    t.e_to_battery += std::max(r.p_batt_actual, 0.0) * dt_h;
    t.e_from_battery += std::max(-r.p_batt_actual, 0.0) * dt_h;
    t.e_standby += (r.p_pv + r.p_grid - r.p_load - r.p_batt_actual) * dt_h;
    ramps.add(r.rr_violated, r.rr_pct_per_min, r.rr_controlled);
  }
  t.e_grid_total = t.e_from_grid + t.e_to_grid;
  t.e_battery_total = t.e_to_battery + t.e_from_battery;
  t.n_ramps_original = ramps.events();
  t.n_ramps_controlled = ramps.controlled_events();
  return t;
}

KpiReport compute_kpis(const EnergyTotals& totals) {
  KpiReport r;
  r.totals = totals;
  const double load = totals.e_load;
  r.scr = ratio(totals.e_pv_consumed, totals.e_pv_generated, "no PV generation");
  r.ssr = ratio(totals.e_pv_consumed, load, "no load consumption");
  r.grf = ratio(totals.e_grid_total, load, "no load consumption");
  r.bcr = ratio(totals.e_to_battery, totals.e_battery_total, "no battery throughput");
  r.eg = ratio(totals.e_from_grid, totals.e_grid_total, "no grid exchange");
  r.fgu = ratio(totals.e_from_grid, load, "no load consumption");
  r.tgu = ratio(totals.e_to_grid, load, "no load consumption");
  r.fbu = ratio(totals.e_from_battery, load, "no load consumption");
  r.tbu = ratio(totals.e_to_battery, load, "no load consumption");
  if (totals.n_ramps_original == 0) {
    r.crr = {1.0, {}};
    r.crr_no_violations = true;
    r.notes.emplace_back("CRR: no ramp violations occurred; reported as 100 % by convention");
  } else {
    r.crr = {static_cast<double>(totals.n_ramps_controlled) / static_cast<double>(totals.n_ramps_original), {}};
  }
  r.notes.emplace_back(
      "BCR is E_to_battery / E_battery_total. Some reported BCR figures match the discharge share "
      "E_from_battery / E_battery_total instead, which equals 1 - BCR");
  return r;
}

std::string kpi_report_json(const KpiReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json kpis = ordered_json::object();
  ordered_json undefined = ordered_json::object();
  for (const auto& [name, value] : report.entries()) {
    if (value->defined()) {
      kpis[std::string(name)] = value->percent();
    } else {
      kpis[std::string(name)] = nullptr;
      undefined[std::string(name)] = value->reason;
    }
  }
  doc["unit"] = "percent";
  doc["kpis"] = kpis;
  doc["undefined"] = undefined;
  doc["flags"] = {{"crr_no_violations", report.crr_no_violations}};

  const auto& t = report.totals;
  doc["totals"] = {{"e_pv_generated_wh", t.e_pv_generated},
                   {"e_pv_consumed_wh", t.e_pv_consumed},
                   {"e_load_wh", t.e_load},
                   {"e_from_grid_wh", t.e_from_grid},
                   {"e_to_grid_wh", t.e_to_grid},
                   {"e_grid_total_wh", t.e_grid_total},
                   {"e_to_battery_wh", t.e_to_battery},
                   {"e_from_battery_wh", t.e_from_battery},
                   {"e_battery_total_wh", t.e_battery_total},
                   {"e_standby_wh", t.e_standby},
                   {"n_ramps_original", t.n_ramps_original},
                   {"n_ramps_controlled", t.n_ramps_controlled}};
  doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

}  // namespace vrfb
