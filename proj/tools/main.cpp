#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/fixtures.hpp"

namespace {

using namespace vrfb;
using namespace vrfb::app;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig load_config(const std::string& path, const std::string& out_dir) {
  RunConfig config = load_run_config(path);
  apply_environment(config);
  if (!out_dir.empty()) config.out_dir = out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PV + flow-battery microgrid EMS simulator"};
  app.require_subcommand(0, 1);

  std::string seed_dir;
  app.add_option("--seed-fixtures", seed_dir, "Write the bundled synthetic fixture corpus to DIR");

  std::string config_path;
  std::string out_dir;
  std::string strategy;
  std::string strategies;
  std::string windows;
  std::string pv_path;
  std::string date;

  auto* sim = app.add_subcommand("simulate", "Run one strategy and write trace, KPI report and histogram");
  sim->add_option("--config", config_path, "Run configuration (JSON)")->required();
  sim->add_option("--strategy", strategy, "Override strategy: SCM, SCM_RR, SCM_RR_WF");
  sim->add_option("--out-dir", out_dir, "Directory for outputs");

  auto* ramp = app.add_subcommand("ramp-analyze", "Ramp-rate histogram and moving-average window sweep");
  ramp->add_option("--config", config_path, "Run configuration (JSON)");
  ramp->add_option("--pv", pv_path, "PV CSV (overrides the config's pv_path)");
  ramp->add_option("--windows", windows, "Comma-separated averaging windows in seconds");
  ramp->add_option("--out-dir", out_dir, "Directory for outputs");

  auto* cmp = app.add_subcommand("compare", "Run several strategies on identical inputs");
  cmp->add_option("--config", config_path, "Run configuration (JSON)")->required();
  cmp->add_option("--strategies", strategies, "Comma-separated strategies (default: all three)");
  cmp->add_option("--strategy", strategy, "Single strategy to run");
  cmp->add_option("--out-dir", out_dir, "Directory for outputs");

  auto* fc = app.add_subcommand("forecast-check", "Print the night-charge decision for a date (default tomorrow)");
  fc->add_option("--config", config_path, "Run configuration (JSON)")->required();
  fc->add_option("--date", date, "Date as YYYY-MM-DD");

  auto* schema = app.add_subcommand("config-schema", "Print every configuration key with default and description");

  CLI11_PARSE(app, argc, argv);

  const Console console{std::cout, std::cerr};
  try {
    if (!seed_dir.empty()) {
      for (const auto& name : write_fixture_corpus(seed_dir)) std::cout << "wrote " << seed_dir << '/' << name << '\n';
    }
    if (app.got_subcommand(schema)) {
      std::cout << config_schema_json();
      return 0;
    }
    if (app.got_subcommand(sim)) {
      RunConfig config = load_config(config_path, out_dir);
      if (!strategy.empty()) {
        auto s = parse_strategy(strategy);
        if (!s) throw ConfigError("unknown strategy " + strategy);
        config.ems.strategy = *s;
      }
      return run_simulation(config, console);
    }
    if (app.got_subcommand(ramp)) {
      RunConfig config;
      if (!config_path.empty()) config = load_config(config_path, out_dir);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (!pv_path.empty()) config.pv_path = pv_path;
      if (config.pv_path.empty()) throw ConfigError("ramp-analyze needs --pv or a config with pv_path");
      std::vector<Seconds> ws = config.sweep_windows;
      if (!windows.empty()) {
        ws.clear();
        for (const auto& w : split_list(windows)) ws.emplace_back(std::stoll(w));
      }
      return run_ramp_analysis(config.pv_path, config.pv_unit, config.ems.ramp, ws,
                               config.output(config.outputs.histogram_csv), config.output(config.outputs.sweep_csv),
                               console);
    }
    if (app.got_subcommand(cmp)) {
      const RunConfig config = load_config(config_path, out_dir);
      std::vector<StrategyKind> kinds;
      auto names = split_list(strategies);
      if (!strategy.empty()) names.push_back(strategy);
      for (const auto& n : names) {
        auto s = parse_strategy(n);
        if (!s) throw ConfigError("unknown strategy " + n);
        kinds.push_back(*s);
      }
      return compare_strategies(config, kinds, console);
    }
    if (app.got_subcommand(fc)) {
      const RunConfig config = load_config(config_path, out_dir);
      std::optional<Date> d;
      if (!date.empty()) d = parse_date(date);
      return forecast_check(config, d, console);
    }
    if (seed_dir.empty()) {
      std::cout << app.help();
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
