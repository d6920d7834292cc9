#pragma once

#include <chrono>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vrfb {

class ForecastError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Transport failure after all attempts were spent.
class NetworkError : public ForecastError {
public:
  NetworkError(const std::string& what, int attempts) : ForecastError(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

private:
  int attempts_;
};

using Date = std::chrono::year_month_day;

std::string format_date(Date d);
/// Parses YYYY-MM-DD.
Date parse_date(std::string_view text);

struct WeatherType {
  int id;
  std::string_view description;
};

/// The 29 IPMA weather-type codes (-99 and 0..27).
std::span<const WeatherType> weather_types();
bool is_known_weather_type(int id);
std::string_view weather_type_description(int id);

struct ForecastDay {
  Date date;
  int weather_type_id = 0;
  int region_id = 0;

  friend bool operator==(const ForecastDay&, const ForecastDay&) = default;
};

enum class UnknownBehavior { no_charge, charge };

struct ChargeDecisionPolicy {
  /// Cloudy, Cloudy (high cloud), Intermittent heavy rain, Mist, Fog, Snow.
  std::set<int> charge_ids{4, 5, 14, 16, 17, 18};
  /// Applies to unlisted codes and to the "no information" codes -99 and 0.
  UnknownBehavior unknown_behavior = UnknownBehavior::no_charge;

  void validate() const;
};

bool should_night_charge(const ForecastDay& day, const ChargeDecisionPolicy& policy);

/// Parses an IPMA daily-forecast payload: an object whose "data" array holds
/// entries with "forecastDate" and "idWeatherType". The region comes from the
/// top-level "globalIdLocal" when present, else `region_id`.
std::vector<ForecastDay> parse_daily_forecast(std::string_view payload, int region_id);

/// Entry of the payload for `date`; throws ForecastError when absent.
ForecastDay select_forecast_day(std::string_view payload, int region_id, Date date);

/// Builds a payload in the same schema from forecast days of one region.
std::string render_daily_forecast(std::span<const ForecastDay> days);

std::string read_forecast_fixture(const std::filesystem::path& path);
ForecastDay load_forecast_fixture(const std::filesystem::path& path, int region_id, Date date);

struct HttpOptions {
  /// Extra attempts after the first failure.
  int retries = 2;
  std::chrono::milliseconds timeout{10'000};
  /// Appended to the endpoint base; `{region_id}` is substituted.
  std::string path_template = "{region_id}.json";
};

/// GETs `<endpoint_base>/<path_template>` and returns the raw payload.
/// endpoint_base is `http[s]://host[:port][/prefix]`.
std::string fetch_forecast_payload(int region_id, std::string_view endpoint_base, const HttpOptions& options);

ForecastDay fetch_daily_forecast(int region_id, std::string_view endpoint_base, Date date,
                                 const HttpOptions& options = {});

}  // namespace vrfb
