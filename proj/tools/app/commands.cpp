#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>

#include "vrfb/timeseries.hpp"

namespace vrfb::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string percent_cell(const KpiValue& v) {
  if (!v.defined()) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v.percent());
  return buf;
}

std::string payload_for(const RunConfig& config) {
  if (config.forecast.mode == ForecastMode::fixture) return read_forecast_fixture(config.forecast.fixture_path);
  return fetch_forecast_payload(*config.forecast.region_id, config.forecast.endpoint_base, config.forecast.http);
}

int report_error(Console console, const std::exception& e) {
  console.err << "error: " << e.what() << '\n';
  return 1;
}

}  // namespace

PreparedInputs prepare_inputs(const RunConfig& config) {
  CsvReadOptions pv_opts;
  pv_opts.unit = config.pv_unit;
  CsvReadOptions load_opts;
  load_opts.unit = config.load_unit;
  load_opts.scale = config.load_scale_w;

  PowerSeries pv = load_power_csv(config.pv_path, pv_opts);
  PowerSeries load = load_power_csv(config.load_path, load_opts);

  const ResamplePolicy policy = config.load_resample;
  if (load.step() > pv.step()) load = resample(load, pv.step(), policy);
  auto [pv_a, load_a] = align(pv, load, policy.method);

  const Seconds tick = config.ems.ramp.tick;
  if (pv_a.step() != tick) {
    const ResamplePolicy to_tick{policy.method, std::max(policy.gap_limit, std::max(tick, pv_a.step()))};
    pv_a = resample(pv_a, tick, to_tick);
    load_a = resample(load_a, tick, to_tick);
  }
  return {std::move(pv_a), std::move(load_a)};
}

ChargeCalendar build_charge_calendar(const RunConfig& config, const PowerSeries& pv,
                                     std::vector<std::string>& warnings) {
  ChargeCalendar calendar;
  std::string payload;
  try {
    payload = payload_for(config);
  } catch (const std::exception& e) {
    warnings.push_back(std::string("forecast unavailable, night charge disabled: ") + e.what());
    return calendar;
  }
  const int region = config.forecast.region_id.value_or(0);
  std::map<std::chrono::sys_days, ForecastDay> by_date;
  for (const auto& day : parse_daily_forecast(payload, region)) by_date[std::chrono::sys_days{day.date}] = day;

  const auto first = std::chrono::floor<std::chrono::days>(pv.start() + config.ems.utc_offset);
  const auto last = std::chrono::floor<std::chrono::days>(pv.last_time() + config.ems.utc_offset);
  for (auto d = first; d <= last; d += std::chrono::days{1}) {
    if (auto it = by_date.find(d); it != by_date.end()) calendar[d] = should_night_charge(it->second, config.forecast.policy);
  }
  return calendar;
}

StrategyRun run_strategy(const RunConfig& config, const PreparedInputs& inputs, const ChargeCalendar& calendar,
                         StrategyKind strategy) {
  EmsConfig ems = config.ems;
  ems.strategy = strategy;
  StrategyRun run{strategy, simulate(inputs.pv, inputs.load, ems, config.battery, config.initial_soc, calendar), {}};
  run.kpis = compute_kpis(accumulate(run.simulation.records, static_cast<double>(ems.ramp.tick.count())));
  return run;
}

void write_trace_csv(std::ostream& out, std::span<const DispatchRecord> trace) {
  out << "timestamp,p_pv,p_load,p_batt_cmd,p_batt_actual,p_grid,soc,mode,rr,rr_violated,rr_controlled\n";
  for (const auto& r : trace) {
    out << format_timestamp(r.timestamp) << ',' << format_number(r.p_pv) << ',' << format_number(r.p_load) << ','
        << format_number(r.p_batt_cmd) << ',' << format_number(r.p_batt_actual) << ',' << format_number(r.p_grid)
        << ',' << format_number(r.soc) << ',' << to_string(r.mode) << ',' << format_number(r.rr_pct_per_min) << ','
        << (r.rr_violated ? 1 : 0) << ',' << (r.rr_controlled ? 1 : 0) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const RampHistogram& h) {
  char buf[64];
  out << "bucket,minutes,percent\n";
  const std::pair<const char*, std::size_t> rows[] = {
      {"<5", h.below_5}, {">=5", h.at_least_5}, {">=10", h.at_least_10}, {">10", h.above_10}, {">=50", h.at_least_50}};
  for (const auto& [name, count] : rows) {
    std::snprintf(buf, sizeof buf, "%.4f", h.percent(count));
    out << name << ',' << count << ',' << buf << '\n';
  }
  out << "total," << h.minutes << ",100.0000\n";
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "window_s,detected_ramps,controlled_ramps\n";
  for (const auto& r : rows) out << r.window.count() << ',' << r.detected_ramps << ',' << r.controlled_ramps << '\n';
}

void write_compare_csv(std::ostream& out, std::span<const StrategyRun> runs) {
  out << "kpi";
  for (const auto& r : runs) out << ',' << to_string(r.strategy);
  out << '\n';
  if (runs.empty()) return;
  for (std::size_t i = 0; i < 10; ++i) {
    out << runs.front().kpis.entries()[i].first;
    for (const auto& r : runs) out << ',' << percent_cell(*r.kpis.entries()[i].second);
    out << '\n';
  }
}

void print_kpi_table(std::ostream& out, std::span<const StrategyRun> runs) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s", "KPI");
  out << buf;
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof buf, "%12s", std::string(to_string(r.strategy)).c_str());
    out << buf;
  }
  out << "   (%)\n";
  if (runs.empty()) return;
  for (std::size_t i = 0; i < 10; ++i) {
    std::snprintf(buf, sizeof buf, "%-6s", std::string(runs.front().kpis.entries()[i].first).c_str());
    out << buf;
    for (const auto& r : runs) {
      const auto cell = percent_cell(*r.kpis.entries()[i].second);
      std::snprintf(buf, sizeof buf, "%12s", cell.empty() ? "n/a" : cell.c_str());
      out << buf;
    }
    out << '\n';
  }
  for (const auto& r : runs) {
    out << to_string(r.strategy) << ": ramps " << r.kpis.totals.n_ramps_controlled << '/'
        << r.kpis.totals.n_ramps_original << " controlled";
    if (r.kpis.crr_no_violations) out << " (no violations occurred)";
    out << '\n';
  }
}

int run_simulation(const RunConfig& config, Console console) {
  try {
    config.validate();
    const auto strategy = config.ems.strategy;
    if (strategy != StrategyKind::scm_rr_wf && config.forecast.present) {
      console.err << "warning: forecast section ignored for strategy " << to_string(strategy) << '\n';
    }
    const PreparedInputs inputs = prepare_inputs(config);

    std::vector<std::string> warnings;
    ChargeCalendar calendar;
    if (strategy == StrategyKind::scm_rr_wf) calendar = build_charge_calendar(config, inputs.pv, warnings);

    const StrategyRun run = run_strategy(config, inputs, calendar, strategy);
    for (const auto& w : warnings) console.err << "warning: " << w << '\n';
    for (const auto& w : run.simulation.warnings) console.err << "warning: " << w << '\n';

    const fs::path trace_path = config.output(config.outputs.trace_csv);
    auto trace = open_output(trace_path);
    write_trace_csv(trace, run.simulation.records);
    finish(trace, trace_path);

    const fs::path kpi_path = config.output(config.outputs.kpi_json);
    auto kpi = open_output(kpi_path);
    kpi << kpi_report_json(run.kpis);
    finish(kpi, kpi_path);

    const fs::path hist_path = config.output(config.outputs.histogram_csv);
    auto hist = open_output(hist_path);
    write_histogram_csv(hist, ramp_histogram(inputs.pv, config.ems.ramp));
    finish(hist, hist_path);

    console.out << "simulated " << run.simulation.records.size() << " ticks of " << config.ems.ramp.tick.count()
                << " s with " << to_string(strategy) << '\n';
    print_kpi_table(console.out, std::span<const StrategyRun>(&run, 1));
    console.out << "wrote " << trace_path.string() << ", " << kpi_path.string() << ", " << hist_path.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(console, e);
  }
}

int run_ramp_analysis(const fs::path& pv_path, PowerUnit unit, const RampConfig& cfg, std::vector<Seconds> windows,
                      const fs::path& histogram_csv, const fs::path& sweep_csv, Console console) {
  try {
    cfg.validate();
    if (windows.empty()) {
      windows.push_back(Seconds{20});
      console.err << "notice: no sweep windows given; using 20 s\n";
    }
    const PowerSeries pv = load_power_csv(pv_path, unit);
    const RampHistogram h = ramp_histogram(pv, cfg);
    const auto rows = window_sweep(pv, cfg, windows);

    auto hist = open_output(histogram_csv);
    write_histogram_csv(hist, h);
    finish(hist, histogram_csv);
    auto sweep = open_output(sweep_csv);
    write_sweep_csv(sweep, rows);
    finish(sweep, sweep_csv);

    write_histogram_csv(console.out, h);
    write_sweep_csv(console.out, rows);
    console.out << "wrote " << histogram_csv.string() << ", " << sweep_csv.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(console, e);
  }
}

int compare_strategies(const RunConfig& config, std::vector<StrategyKind> strategies, Console console) {
  try {
    if (strategies.empty()) strategies = {StrategyKind::scm, StrategyKind::scm_rr, StrategyKind::scm_rr_wf};
    RunConfig checked = config;
    for (auto s : strategies) {
      checked.ems.strategy = s;
      checked.validate();
    }
    const PreparedInputs inputs = prepare_inputs(config);

    std::vector<std::string> warnings;
    ChargeCalendar calendar;
    const bool needs_forecast =
        std::find(strategies.begin(), strategies.end(), StrategyKind::scm_rr_wf) != strategies.end();
    if (needs_forecast) calendar = build_charge_calendar(config, inputs.pv, warnings);

    // Simulations share no mutable state; results are collected in request order.
    std::vector<std::future<StrategyRun>> pending;
    for (auto s : strategies) {
      pending.push_back(std::async(std::launch::async, [&, s] { return run_strategy(config, inputs, calendar, s); }));
    }
    std::vector<StrategyRun> runs;
    for (auto& f : pending) runs.push_back(f.get());

    for (const auto& w : warnings) console.err << "warning: " << w << '\n';
    for (const auto& r : runs) {
      for (const auto& w : r.simulation.warnings) console.err << "warning: [" << to_string(r.strategy) << "] " << w << '\n';
    }

    const fs::path table_path = config.output(config.outputs.compare_csv);
    auto table = open_output(table_path);
    write_compare_csv(table, runs);
    finish(table, table_path);
    for (const auto& r : runs) {
      const fs::path p = config.output("kpi_" + std::string(to_string(r.strategy)) + ".json");
      auto out = open_output(p);
      out << kpi_report_json(r.kpis);
      finish(out, p);
    }

    print_kpi_table(console.out, runs);
    console.out << "wrote " << table_path.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(console, e);
  }
}

int forecast_check(const RunConfig& config, std::optional<Date> date, Console console) {
  try {
    if (!config.forecast.present) throw ConfigError("config has no forecast section");
    config.forecast.policy.validate();
    if (!date) {
      const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
      date = Date{std::chrono::floor<std::chrono::days>(now + config.ems.utc_offset) + std::chrono::days{1}};
    }
    if (config.forecast.mode == ForecastMode::live && !config.forecast.region_id)
      throw ConfigError("config: forecast.region_id is required in live mode");
    const ForecastDay day = select_forecast_day(payload_for(config), config.forecast.region_id.value_or(0), *date);
    const bool charge = should_night_charge(day, config.forecast.policy);
    console.out << format_date(day.date) << " region " << day.region_id << ": weather type " << day.weather_type_id
                << " (" << weather_type_description(day.weather_type_id) << ") -> night charge "
                << (charge ? "yes" : "no") << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(console, e);
  }
}

}  // namespace vrfb::app
