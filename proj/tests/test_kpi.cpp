#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "vrfb/kpi.hpp"

using namespace vrfb;
using namespace std::chrono_literals;

namespace {

DispatchRecord rec(double pv, double load, double batt, double standby = 0.0) {
  DispatchRecord r;
  r.p_pv = pv;
  r.p_load = load;
  r.p_batt_actual = batt;
  r.p_grid = load + batt + standby - pv;
  return r;
}

double round1(double x) { return std::round(x * 10.0) / 10.0; }

}  // namespace

TEST_CASE("totals from a hand-checked trace") {
  // one hour per tick
  const std::vector<DispatchRecord> trace{rec(3000, 1000, 1500), rec(0, 1000, -800), rec(2000, 500, 0)};
  const auto t = accumulate(trace, 3600.0);
  CHECK(t.e_pv_generated == 5000.0);
  CHECK(t.e_load == 2500.0);
  CHECK(t.e_to_grid == 500.0 + 1500.0);
  CHECK(t.e_from_grid == 200.0);
  CHECK(t.e_pv_consumed == 2500.0 + 0.0 + 500.0);
  CHECK(t.e_to_battery == 1500.0);
  CHECK(t.e_from_battery == 800.0);
  CHECK(t.losses() == doctest::Approx(0.0));

  const auto k = compute_kpis(t);
  CHECK(*k.scr.value == doctest::Approx(3000.0 / 5000.0));
  CHECK(*k.ssr.value == doctest::Approx(3000.0 / 2500.0));
  CHECK(*k.grf.value == doctest::Approx(2200.0 / 2500.0));
  CHECK(*k.bcr.value == doctest::Approx(1500.0 / 2300.0));
  CHECK(*k.eg.value == doctest::Approx(200.0 / 2200.0));
  CHECK(*k.fbu.value == doctest::Approx(800.0 / 2500.0));
  CHECK(*k.tbu.value == doctest::Approx(1500.0 / 2500.0));
}

TEST_CASE("identities GRF = FGU + TGU and EG = FGU / GRF") {
  for (double from : {0.0, 1.0, 57.2, 60.2, 1e4}) {
    for (double to : {0.0, 0.71, 3.06, 250.0}) {
      EnergyTotals t;
      t.e_load = 100.0;
      t.e_from_grid = from;
      t.e_to_grid = to;
      t.e_grid_total = from + to;
      const auto k = compute_kpis(t);
      CHECK(std::abs(*k.grf.value - (*k.fgu.value + *k.tgu.value)) <= 1e-9);
      if (k.eg.defined()) CHECK(std::abs(*k.eg.value - *k.fgu.value / *k.grf.value) <= 1e-9);
    }
  }
}

TEST_CASE("reference grid totals reproduce the reference ratios") {
  struct Row {
    double fgu, tgu, grf, eg;
  };
  for (const Row& row : {Row{57.2, 0.71, 57.9, 98.8}, Row{60.2, 3.06, 63.3, 95.2}, Row{57.7, 3.09, 60.8, 94.9}}) {
    EnergyTotals t;
    t.e_load = 100.0;
    t.e_from_grid = row.fgu;
    t.e_to_grid = row.tgu;
    t.e_grid_total = row.fgu + row.tgu;
    const auto k = compute_kpis(t);
    CHECK(round1(k.grf.percent()) == doctest::Approx(row.grf));
    CHECK(std::abs(k.eg.percent() - row.eg) <= 0.1);
  }
}

TEST_CASE("zero denominators are undefined with a reason") {
  EnergyTotals t;
  const auto k = compute_kpis(t);
  for (const auto& [name, v] : k.entries()) {
    if (name == "CRR") continue;
    CHECK_MESSAGE(!v->defined(), name);
    CHECK_FALSE(v->reason.empty());
  }
  CHECK(k.crr_no_violations);
  CHECK(*k.crr.value == 1.0);
  CHECK_THROWS_AS(accumulate(std::vector<DispatchRecord>{}, 2.0), std::invalid_argument);
}

TEST_CASE("controlled ramp ratio counts events") {
  std::vector<DispatchRecord> trace(8, rec(0, 0, 0));
  auto mark = [&](std::size_t i, double rr, bool ctl) {
    trace[i].rr_violated = true;
    trace[i].rr_pct_per_min = rr;
    trace[i].rr_controlled = ctl;
  };
  mark(1, 20, true);
  mark(2, 25, true);
  mark(4, -30, false);
  mark(6, 40, true);
  const auto t = accumulate(trace, 2.0);
  CHECK(t.n_ramps_original == 3);
  CHECK(t.n_ramps_controlled == 2);
  const auto k = compute_kpis(t);
  CHECK(*k.crr.value == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(k.crr_no_violations);
}

TEST_CASE("standby shows up as the loss term") {
  const std::vector<DispatchRecord> trace{rec(1000, 500, 400, 30), rec(0, 500, -400, 30)};
  const auto t = accumulate(trace, 3600.0);
  CHECK(t.e_standby == doctest::Approx(60.0));
  CHECK(t.losses() == doctest::Approx(60.0));
}

TEST_CASE("property: KPIs are scale invariant and BCR complements the discharge share") {
  std::vector<DispatchRecord> trace;
  for (int i = 0; i < 200; ++i) {
    const double pv = 50.0 * (i % 37), load = 900.0 + 13.0 * (i % 11), batt = 40.0 * ((i % 23) - 11);
    trace.push_back(rec(pv, load, batt, 30.0));
  }
  const auto base = compute_kpis(accumulate(trace, 2.0));
  for (double k : {0.001, 3.0, 1e4}) {
    auto scaled = trace;
    for (auto& r : scaled) {
      r.p_pv *= k;
      r.p_load *= k;
      r.p_batt_actual *= k;
      r.p_grid *= k;
    }
    const auto s = compute_kpis(accumulate(scaled, 2.0));
    for (std::size_t i = 0; i < 10; ++i)
      CHECK(*s.entries()[i].second->value == doctest::Approx(*base.entries()[i].second->value).epsilon(1e-12));
  }
  const auto& t = base.totals;
  CHECK(*base.bcr.value + t.e_from_battery / t.e_battery_total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("json report layout") {
  EnergyTotals t;
  t.e_load = 10.0;
  t.e_from_grid = 10.0;
  t.e_grid_total = 10.0;
  const auto doc = nlohmann::json::parse(kpi_report_json(compute_kpis(t)));
  CHECK(doc["unit"] == "percent");
  CHECK(doc["kpis"]["FGU"].get<double>() == doctest::Approx(100.0));
  CHECK(doc["kpis"]["SCR"].is_null());
  CHECK(doc["undefined"].contains("SCR"));
  CHECK(doc["flags"]["crr_no_violations"] == true);
  CHECK(doc["totals"]["e_load_wh"] == 10.0);
  CHECK(doc["notes"].size() >= 1);
}
