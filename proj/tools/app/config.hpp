#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vrfb/battery.hpp"
#include "vrfb/ems.hpp"
#include "vrfb/forecast.hpp"
#include "vrfb/timeseries.hpp"

namespace vrfb::app {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kEndpointEnvVar = "VRFB_EMS_FORECAST_ENDPOINT";

enum class ForecastMode { fixture, live };

struct ForecastSettings {
  bool present = false;  // a "forecast" section was given
  ForecastMode mode = ForecastMode::fixture;
  std::filesystem::path fixture_path;
  std::string endpoint_base;
  std::optional<int> region_id;
  ChargeDecisionPolicy policy;
  HttpOptions http;
};

struct OutputSettings {
  std::filesystem::path trace_csv = "trace.csv";
  std::filesystem::path kpi_json = "kpi.json";
  std::filesystem::path histogram_csv = "histogram.csv";
  std::filesystem::path sweep_csv = "sweep.csv";
  std::filesystem::path compare_csv = "compare.csv";
};

struct RunConfig {
  std::filesystem::path pv_path;
  std::filesystem::path load_path;
  PowerUnit pv_unit = PowerUnit::watt;
  PowerUnit load_unit = PowerUnit::watt;
  double load_scale_w = 1.0;
  ResamplePolicy load_resample;

  BatteryParams battery;
  double initial_soc = 0.35;
  EmsConfig ems;
  ForecastSettings forecast;

  std::vector<Seconds> sweep_windows;
  std::filesystem::path out_dir;
  OutputSettings outputs;

  void validate() const;
  /// Output path resolved against out_dir.
  std::filesystem::path output(const std::filesystem::path& name) const;
};

/// Relative input paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Overrides the forecast endpoint from the environment when set.
void apply_environment(RunConfig& config);

/// Every configuration key with its default and a description.
std::string config_schema_json();

}  // namespace vrfb::app
