#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/fixtures.hpp"

using namespace vrfb;
using namespace vrfb::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vrfb_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Captured {
  std::ostringstream out, err;
  Console console() { return {out, err}; }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_CASE("config parsing resolves paths and rejects unknown keys") {
  const auto cfg = parse_run_config(R"({"pv_path":"pv.csv","load_path":"/abs/load.csv","strategy":"SCM"})", "/base");
  CHECK(cfg.pv_path == fs::path("/base/pv.csv"));
  CHECK(cfg.load_path == fs::path("/abs/load.csv"));
  CHECK(cfg.out_dir == fs::path("/base"));
  CHECK(cfg.ems.strategy == StrategyKind::scm);
  CHECK_THROWS_AS(parse_run_config(R"({"pv_path":"a","load_path":"b","bogus":1})", "."), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"pv_path":"a","load_path":"b","battery":{"capacity":1}})", "."),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"pv_path":"a","load_path":"b","strategy":"FOO"})", "."), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{oops", "."), ConfigError);
  const auto t = parse_run_config(R"({"pv_path":"a","load_path":"b","ems":{"charge_start_time":"02:15"}})", ".");
  CHECK(t.ems.charge_start == std::chrono::minutes{135});
  CHECK_THROWS_AS(parse_run_config(R"({"pv_path":"a","load_path":"b","ems":{"charge_start_time":"25:00"}})", "."),
                  ConfigError);
}

TEST_CASE("WF strategy requires a forecast section") {
  auto cfg = parse_run_config(R"({"pv_path":"a","load_path":"b","strategy":"SCM_RR_WF"})", ".");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("environment overrides the endpoint") {
  auto cfg = parse_run_config(
      R"({"pv_path":"a","load_path":"b","forecast":{"mode":"live","endpoint_base":"http://x","region_id":1}})", ".");
  ::setenv(kEndpointEnvVar, "http://127.0.0.1:1", 1);
  apply_environment(cfg);
  ::unsetenv(kEndpointEnvVar);
  CHECK(cfg.forecast.endpoint_base == "http://127.0.0.1:1");
}

TEST_CASE("config schema lists every section") {
  const auto doc = nlohmann::json::parse(config_schema_json());
  for (const char* key : {"pv_path", "battery", "ems", "forecast", "ramp_analysis", "outputs"}) CHECK(doc.contains(key));
  CHECK(doc["battery"]["eta_acdc"]["default"] == 0.88);
  CHECK(doc["ems"]["ramp"]["limit_pct_per_min"]["default"] == 10.0);
}

TEST_CASE("simulate writes a trace whose columns round-trip") {
  const auto dir = scratch("simulate");
  write_fixture_corpus(dir);
  auto cfg = load_run_config(dir / "config.json");
  Captured io;
  REQUIRE(run_simulation(cfg, io.console()) == 0);

  std::ifstream trace(cfg.output(cfg.outputs.trace_csv));
  std::string line;
  std::getline(trace, line);
  CHECK(line == "timestamp,p_pv,p_load,p_batt_cmd,p_batt_actual,p_grid,soc,mode,rr,rr_violated,rr_controlled");
  std::size_t rows = 0;
  while (std::getline(trace, line)) {
    const auto c = split(line);
    REQUIRE(c.size() == 11);
    REQUIRE(parse_timestamp(c[0]));
    const double pv = std::stod(c[1]), load = std::stod(c[2]), actual = std::stod(c[4]), grid = std::stod(c[5]);
    REQUIRE(std::abs(pv + grid - (load + actual + cfg.battery.standby_power_w)) <= 1e-6);
    REQUIRE(parse_control_mode(c[7]));
    ++rows;
  }
  CHECK(rows == 7 * 43200);

  const auto kpi = nlohmann::json::parse(slurp(cfg.output(cfg.outputs.kpi_json)));
  CHECK(kpi["kpis"].size() == 10);
  CHECK(fs::exists(cfg.output(cfg.outputs.histogram_csv)));
}

TEST_CASE("compare is deterministic") {
  const auto dir = scratch("compare");
  write_fixture_corpus(dir);
  auto cfg = load_run_config(dir / "config.json");
  Captured a, b;
  REQUIRE(compare_strategies(cfg, {}, a.console()) == 0);
  const auto first = slurp(cfg.output(cfg.outputs.compare_csv));
  const auto first_kpi = slurp(cfg.output("kpi_SCM_RR_WF.json"));
  REQUIRE(compare_strategies(cfg, {}, b.console()) == 0);
  CHECK(first == slurp(cfg.output(cfg.outputs.compare_csv)));
  CHECK(first_kpi == slurp(cfg.output("kpi_SCM_RR_WF.json")));
  CHECK(a.out.str() == b.out.str());
}

TEST_CASE("ramp analysis writes histogram and sweep") {
  const auto dir = scratch("ramp");
  write_fixture_corpus(dir);
  Captured io;
  REQUIRE(run_ramp_analysis(dir / "pv_fluctuating_7d.csv", PowerUnit::watt, RampConfig{}, {}, dir / "h.csv",
                            dir / "s.csv", io.console()) == 0);
  CHECK(slurp(dir / "s.csv").rfind("window_s,detected_ramps,controlled_ramps\n20,", 0) == 0);
  CHECK(slurp(dir / "h.csv").rfind("bucket,minutes,percent\n", 0) == 0);
}

TEST_CASE("forecast unavailable disables night charge with a warning") {
  const auto dir = scratch("noforecast");
  write_fixture_corpus(dir);
  auto cfg = load_run_config(dir / "config.json");
  cfg.forecast.fixture_path = dir / "missing.json";
  Captured io;
  REQUIRE(run_simulation(cfg, io.console()) == 0);
  CHECK(io.err.str().find("night charge disabled") != std::string::npos);
  CHECK(slurp(cfg.output(cfg.outputs.trace_csv)).find("night_charge") == std::string::npos);
}

TEST_CASE("forecast-check reports the decision") {
  const auto dir = scratch("fcheck");
  write_fixture_corpus(dir);
  const auto cfg = load_run_config(dir / "config.json");
  Captured io;
  REQUIRE(forecast_check(cfg, parse_date("2018-01-02"), io.console()) == 0);
  CHECK(io.out.str().find("weather type 4") != std::string::npos);
  CHECK(io.out.str().find("night charge yes") != std::string::npos);
  Captured bad;
  CHECK(forecast_check(cfg, parse_date("2030-01-01"), bad.console()) == 1);
  CHECK(bad.err.str().rfind("error: ", 0) == 0);
}

TEST_CASE("bad input files fail with a message") {
  const auto dir = scratch("bad");
  write_fixture_corpus(dir);
  std::ofstream(dir / "bad.csv") << "t,p\n0,1\n2,x\n";
  auto cfg = load_run_config(dir / "config.json");
  cfg.pv_path = dir / "bad.csv";
  Captured io;
  CHECK(run_simulation(cfg, io.console()) == 1);
  CHECK(io.err.str().find("bad.csv:3:") != std::string::npos);
}

TEST_CASE("trace power columns reload through the profile loader") {
  const auto dir = scratch("roundtrip");
  write_fixture_corpus(dir);
  auto cfg = load_run_config(dir / "config.json");
  cfg.ems.strategy = StrategyKind::scm_rr;
  Captured io;
  REQUIRE(run_simulation(cfg, io.console()) == 0);
  const auto inputs = prepare_inputs(cfg);
  CsvReadOptions pv_col;
  pv_col.column = "p_pv";
  CHECK(load_power_csv(cfg.output(cfg.outputs.trace_csv), pv_col) == inputs.pv);
  CsvReadOptions grid_col;
  grid_col.column = "p_grid";
  const auto grid = load_power_csv(cfg.output(cfg.outputs.trace_csv), grid_col);
  const auto run = run_strategy(cfg, inputs, {}, StrategyKind::scm_rr);
  REQUIRE(grid.size() == run.simulation.records.size());
  for (std::size_t i = 0; i < grid.size(); ++i) REQUIRE(grid[i] == run.simulation.records[i].p_grid);
}
