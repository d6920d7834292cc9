#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace vrfb::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + std::string(section));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void read_seconds(const json& obj, const char* key, Seconds& out) {
  if (!obj.contains(key)) return;
  std::int64_t v = 0;
  read(obj, key, v);
  out = Seconds{v};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path{p};
  return path.is_absolute() ? path : base / path;
}

PowerUnit parse_unit(const std::string& s) {
  if (s == "W") return PowerUnit::watt;
  if (s == "kW") return PowerUnit::kilowatt;
  throw ConfigError("config: unit must be \"W\" or \"kW\", got \"" + s + "\"");
}

std::chrono::minutes parse_clock(const std::string& s) {
  unsigned h = 0, m = 0;
  char colon = 0;
  std::istringstream in(s);
  if (!(in >> h >> colon >> m) || colon != ':' || h > 23 || m > 59 || !in.eof())
    throw ConfigError("config: clock time must be HH:MM, got \"" + s + "\"");
  return std::chrono::hours{h} + std::chrono::minutes{m};
}

}  // namespace

void RunConfig::validate() const {
  if (pv_path.empty()) throw ConfigError("config: pv_path is required");
  if (load_path.empty()) throw ConfigError("config: load_path is required");
  if (!(load_scale_w > 0.0)) throw ConfigError("config: load_scale_w must be positive");
  try {
    battery.validate();
    ems.validate(battery);
    (void)make_battery_state(battery, initial_soc);
    forecast.policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (ems.strategy == StrategyKind::scm_rr_wf) {
    if (!forecast.present) throw ConfigError("config: strategy SCM_RR_WF needs a forecast section");
    if (forecast.mode == ForecastMode::fixture && forecast.fixture_path.empty())
      throw ConfigError("config: forecast.fixture_path is required in fixture mode");
    if (forecast.mode == ForecastMode::live && forecast.endpoint_base.empty())
      throw ConfigError("config: forecast.endpoint_base is required in live mode");
    if (forecast.mode == ForecastMode::live && !forecast.region_id)
      throw ConfigError("config: forecast.region_id is required in live mode");
  }
  for (const auto w : sweep_windows) {
    if (w.count() <= 0) throw ConfigError("config: sweep windows must be positive");
  }
}

fs::path RunConfig::output(const fs::path& name) const {
  return name.is_absolute() || out_dir.empty() ? name : out_dir / name;
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"pv_path", "load_path", "pv_unit", "load_unit", "load_scale_w", "load_resample", "gap_limit_s",
              "strategy", "battery", "ems", "forecast", "ramp_analysis", "out_dir", "outputs"});

  RunConfig c;
  std::string s;
  read(doc, "pv_path", s);
  c.pv_path = resolve(base_dir, s);
  s.clear();
  read(doc, "load_path", s);
  c.load_path = resolve(base_dir, s);
  s = "W";
  read(doc, "pv_unit", s);
  c.pv_unit = parse_unit(s);
  s = "W";
  read(doc, "load_unit", s);
  c.load_unit = parse_unit(s);
  read(doc, "load_scale_w", c.load_scale_w);
  s = "hold";
  read(doc, "load_resample", s);
  if (s == "hold") {
    c.load_resample.method = ResampleMethod::hold;
  } else if (s == "linear") {
    c.load_resample.method = ResampleMethod::linear;
  } else {
    throw ConfigError("config: load_resample must be \"hold\" or \"linear\"");
  }
  read_seconds(doc, "gap_limit_s", c.load_resample.gap_limit);

  s = std::string(to_string(c.ems.strategy));
  read(doc, "strategy", s);
  if (auto k = parse_strategy(s)) {
    c.ems.strategy = *k;
  } else {
    throw ConfigError("config: unknown strategy \"" + s + "\"");
  }

  if (doc.contains("battery")) {
    const auto& b = doc["battery"];
    check_keys(b, "battery",
               {"energy_capacity_wh", "power_nominal_w", "soc_min", "soc_max", "eta_acdc", "standby_power_w",
                "derate_band", "initial_soc"});
    read(b, "energy_capacity_wh", c.battery.energy_capacity_wh);
    read(b, "power_nominal_w", c.battery.power_nominal_w);
    read(b, "soc_min", c.battery.soc_min);
    read(b, "soc_max", c.battery.soc_max);
    read(b, "eta_acdc", c.battery.eta_acdc);
    read(b, "standby_power_w", c.battery.standby_power_w);
    read(b, "derate_band", c.battery.derate_band);
    read(b, "initial_soc", c.initial_soc);
  }

  if (doc.contains("ems")) {
    const auto& e = doc["ems"];
    check_keys(e, "ems",
               {"night_charge_power_w", "soc_target", "charge_start_time", "utc_offset_h", "day_start_fraction",
                "ramp"});
    read(e, "night_charge_power_w", c.ems.night_charge_power_w);
    read(e, "soc_target", c.ems.soc_target);
    read(e, "day_start_fraction", c.ems.day_start_fraction);
    if (e.contains("charge_start_time")) {
      std::string clock;
      read(e, "charge_start_time", clock);
      c.ems.charge_start = parse_clock(clock);
    }
    if (e.contains("utc_offset_h")) {
      double hours = 0.0;
      read(e, "utc_offset_h", hours);
      c.ems.utc_offset = std::chrono::minutes{static_cast<std::int64_t>(hours * 60.0)};
    }
    if (e.contains("ramp")) {
      const auto& r = e["ramp"];
      check_keys(r, "ems.ramp", {"nameplate_w", "limit_pct_per_min", "window_s", "tick_s"});
      read(r, "nameplate_w", c.ems.ramp.nameplate_w);
      read(r, "limit_pct_per_min", c.ems.ramp.limit_pct_per_min);
      read_seconds(r, "window_s", c.ems.ramp.window);
      read_seconds(r, "tick_s", c.ems.ramp.tick);
    }
  }

  if (doc.contains("forecast")) {
    const auto& f = doc["forecast"];
    check_keys(f, "forecast",
               {"mode", "fixture_path", "endpoint_base", "path_template", "region_id", "charge_ids",
                "unknown_behavior", "retries", "timeout_s"});
    c.forecast.present = true;
    std::string mode = "fixture";
    read(f, "mode", mode);
    if (mode == "fixture") {
      c.forecast.mode = ForecastMode::fixture;
    } else if (mode == "live") {
      c.forecast.mode = ForecastMode::live;
    } else {
      throw ConfigError("config: forecast.mode must be \"fixture\" or \"live\"");
    }
    std::string fixture;
    read(f, "fixture_path", fixture);
    c.forecast.fixture_path = resolve(base_dir, fixture);
    read(f, "endpoint_base", c.forecast.endpoint_base);
    read(f, "path_template", c.forecast.http.path_template);
    if (f.contains("region_id")) {
      int id = 0;
      read(f, "region_id", id);
      c.forecast.region_id = id;
    }
    if (f.contains("charge_ids")) {
      std::vector<int> ids;
      read(f, "charge_ids", ids);
      c.forecast.policy.charge_ids = {ids.begin(), ids.end()};
    }
    std::string unknown = "no_charge";
    read(f, "unknown_behavior", unknown);
    if (unknown == "no_charge") {
      c.forecast.policy.unknown_behavior = UnknownBehavior::no_charge;
    } else if (unknown == "charge") {
      c.forecast.policy.unknown_behavior = UnknownBehavior::charge;
    } else {
      throw ConfigError("config: forecast.unknown_behavior must be \"no_charge\" or \"charge\"");
    }
    read(f, "retries", c.forecast.http.retries);
    if (f.contains("timeout_s")) {
      double t = 0.0;
      read(f, "timeout_s", t);
      c.forecast.http.timeout = std::chrono::milliseconds{static_cast<std::int64_t>(t * 1000.0)};
    }
  }

  if (doc.contains("ramp_analysis")) {
    const auto& r = doc["ramp_analysis"];
    check_keys(r, "ramp_analysis", {"windows_s"});
    std::vector<std::int64_t> ws;
    read(r, "windows_s", ws);
    for (auto w : ws) c.sweep_windows.emplace_back(w);
  }

  std::string out_dir;
  read(doc, "out_dir", out_dir);
  c.out_dir = out_dir.empty() ? base_dir : resolve(base_dir, out_dir);

  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    check_keys(o, "outputs", {"trace_csv", "kpi_json", "histogram_csv", "sweep_csv", "compare_csv"});
    auto path_of = [&](const char* key, fs::path& out) {
      std::string v;
      read(o, key, v);
      if (!v.empty()) out = v;
    };
    path_of("trace_csv", c.outputs.trace_csv);
    path_of("kpi_json", c.outputs.kpi_json);
    path_of("histogram_csv", c.outputs.histogram_csv);
    path_of("sweep_csv", c.outputs.sweep_csv);
    path_of("compare_csv", c.outputs.compare_csv);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

void apply_environment(RunConfig& config) {
  if (const char* endpoint = std::getenv(kEndpointEnvVar); endpoint != nullptr && *endpoint != '\0') {
    config.forecast.endpoint_base = endpoint;
  }
}

std::string config_schema_json() {
  using nlohmann::ordered_json;
  auto field = [](ordered_json def, const std::string& description) {
    return ordered_json{{"default", std::move(def)}, {"description", description}};
  };
  const BatteryParams b;
  const EmsConfig e;
  const ChargeDecisionPolicy p;
  ordered_json doc;
  doc["pv_path"] = field("", "PV power CSV (timestamp,power)");
  doc["load_path"] = field("", "Load power CSV (timestamp,power); coarser steps are resampled to the tick");
  doc["pv_unit"] = field("W", "Unit of the PV file: W or kW");
  doc["load_unit"] = field("W", "Unit of the load file: W or kW");
  doc["load_scale_w"] = field(1.0, "Multiplier mapping a normalized load profile to watts");
  doc["load_resample"] = field("hold", "hold keeps interval averages (energy preserving); linear interpolates");
  doc["gap_limit_s"] = field(3600, "Largest input sample spacing the resampler bridges, seconds");
  doc["strategy"] = field("SCM_RR_WF", "SCM, SCM_RR or SCM_RR_WF");
  doc["battery"] = {
      {"energy_capacity_wh", field(b.energy_capacity_wh, "Nameplate energy of the flow battery, Wh")},
      {"power_nominal_w", field(b.power_nominal_w, "Inverter/stack power limit, W")},
      {"soc_min", field(b.soc_min, "Lower SOC bound of the operating window")},
      {"soc_max", field(b.soc_max, "Upper SOC bound of the operating window")},
      {"eta_acdc", field(b.eta_acdc, "AC/DC conversion efficiency per direction")},
      {"standby_power_w", field(b.standby_power_w, "Constant standby draw of the battery system, W")},
      {"derate_band", field(b.derate_band, "SOC width next to each bound over which power tapers to zero")},
      {"initial_soc", field(0.35, "SOC at the first tick")}};
  doc["ems"] = {
      {"night_charge_power_w", field(e.night_charge_power_w, "Grid-sourced night charge power, W")},
      {"soc_target", field(e.soc_target, "SOC at which night charging stops")},
      {"charge_start_time", field("01:30", "Local clock time at which night charging may begin")},
      {"utc_offset_h", field(0, "Fixed offset of local time from UTC, hours")},
      {"day_start_fraction", field(e.day_start_fraction, "Averaged PV above this share of nameplate ends the night")},
      {"ramp",
       {{"nameplate_w", field(e.ramp.nameplate_w, "PV nameplate power, W")},
        {"limit_pct_per_min", field(e.ramp.limit_pct_per_min, "Ramp-rate limit, percent of nameplate per minute")},
        {"window_s", field(e.ramp.window.count(), "Moving-average window, seconds")},
        {"tick_s", field(e.ramp.tick.count(), "Control cycle, seconds")}}}};
  doc["forecast"] = {
      {"mode", field("fixture", "fixture (payload on disk) or live (HTTP GET)")},
      {"fixture_path", field("", "Forecast payload file for fixture mode")},
      {"endpoint_base", field("", std::string("Base URL for live mode; overridden by ") + kEndpointEnvVar)},
      {"path_template", field("{region_id}.json", "Path appended to endpoint_base")},
      {"region_id", field(nullptr, "Forecast location id (no default)")},
      {"charge_ids", field(std::vector<int>(p.charge_ids.begin(), p.charge_ids.end()),
                           "Weather-type codes that trigger night charging")},
      {"unknown_behavior", field("no_charge", "Decision for unknown or no-information codes: no_charge or charge")},
      {"retries", field(2, "Extra HTTP attempts after a failure")},
      {"timeout_s", field(10, "HTTP connect/read timeout, seconds")}};
  doc["ramp_analysis"] = {{"windows_s", field(std::vector<int>{20}, "Averaging windows for the sweep, seconds")}};
  doc["out_dir"] = field("", "Directory for outputs; defaults to the config file's directory");
  const OutputSettings o;
  doc["outputs"] = {{"trace_csv", field(o.trace_csv.string(), "Per-tick dispatch trace")},
                    {"kpi_json", field(o.kpi_json.string(), "KPI report")},
                    {"histogram_csv", field(o.histogram_csv.string(), "Ramp-rate histogram")},
                    {"sweep_csv", field(o.sweep_csv.string(), "Window sweep")},
                    {"compare_csv", field(o.compare_csv.string(), "Side-by-side KPI table")}};
  return doc.dump(2) + "\n";
}

}  // namespace vrfb::app
