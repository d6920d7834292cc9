#include "vrfb/forecast.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace vrfb {

namespace {

using nlohmann::json;

constexpr std::array<WeatherType, 29> kWeatherTypes{{
    {-99, "---"},
    {0, "No information"},
    {1, "Clear sky"},
    {2, "Partly cloudy"},
    {3, "Sunny intervals"},
    {4, "Cloudy"},
    {5, "Cloudy (High cloud)"},
    {6, "Showers"},
    {7, "Light showers"},
    {8, "Heavy showers"},
    {9, "Rain"},
    {10, "Light rain"},
    {11, "Heavy rain"},
    {12, "Intermittent rain"},
    {13, "Intermittent light rain"},
    {14, "Intermittent heavy rain"},
    {15, "Drizzle"},
    {16, "Mist"},
    {17, "Fog"},
    {18, "Snow"},
    {19, "Thunderstorms"},
    {20, "Showers and thunderstorms"},
    {21, "Hail"},
    {22, "Frost"},
    {23, "Rain and thunderstorms"},
    {24, "Convective clouds"},
    {25, "Partly cloudy"},
    {26, "Fog"},
    {27, "Cloudy"},
}};

bool is_no_information(int id) { return id == -99 || id == 0; }

int json_int(const json& v, const char* field) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    int out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return out;
  }
  throw ForecastError(std::string("forecast payload: field '") + field + "' is not an integer");
}

struct Endpoint {
  std::string scheme_host_port;
  std::string prefix;
};

Endpoint split_endpoint(std::string_view base) {
  const auto scheme_end = base.find("://");
  const auto scheme = base.substr(0, scheme_end);
  if (scheme_end == std::string_view::npos || (scheme != "http" && scheme != "https"))
    throw ForecastError("endpoint must start with http:// or https://, got " + std::string(base));
  const auto path_start = base.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = std::string(base.substr(0, path_start));
  e.prefix = path_start == std::string_view::npos ? std::string{} : std::string(base.substr(path_start));
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

}  // namespace

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !num(text.substr(0, 4), y) ||
      !num(text.substr(5, 2), m) || !num(text.substr(8, 2), d)) {
    throw ForecastError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const Date out{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!out.ok()) throw ForecastError("invalid calendar date '" + std::string(text) + "'");
  return out;
}

std::span<const WeatherType> weather_types() { return kWeatherTypes; }

bool is_known_weather_type(int id) {
  return std::any_of(kWeatherTypes.begin(), kWeatherTypes.end(), [id](const auto& w) { return w.id == id; });
}

std::string_view weather_type_description(int id) {
  for (const auto& w : kWeatherTypes) {
    if (w.id == id) return w.description;
  }
  return "Unknown";
}

void ChargeDecisionPolicy::validate() const {
  for (int id : charge_ids) {
    if (!is_known_weather_type(id) || is_no_information(id))
      throw std::invalid_argument("charge_ids contains " + std::to_string(id) + ", not a weather-type code");
  }
}

bool should_night_charge(const ForecastDay& day, const ChargeDecisionPolicy& policy) {
  const int id = day.weather_type_id;
  if (!is_known_weather_type(id) || is_no_information(id))
    return policy.unknown_behavior == UnknownBehavior::charge;
  return policy.charge_ids.contains(id);
}

std::vector<ForecastDay> parse_daily_forecast(std::string_view payload, int region_id) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw ForecastError(std::string("malformed forecast JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array())
    throw ForecastError("forecast payload has no 'data' array");
  if (doc.contains("globalIdLocal")) region_id = json_int(doc["globalIdLocal"], "globalIdLocal");

  std::vector<ForecastDay> days;
  for (const auto& entry : doc["data"]) {
    if (!entry.is_object() || !entry.contains("forecastDate") || !entry.contains("idWeatherType"))
      throw ForecastError("forecast entry lacks 'forecastDate' or 'idWeatherType'");
    if (!entry["forecastDate"].is_string()) throw ForecastError("forecast entry 'forecastDate' is not a string");
    days.push_back({parse_date(entry["forecastDate"].get<std::string>()),
                    json_int(entry["idWeatherType"], "idWeatherType"), region_id});
  }
  return days;
}

ForecastDay select_forecast_day(std::string_view payload, int region_id, Date date) {
  for (const auto& day : parse_daily_forecast(payload, region_id)) {
    if (day.date == date) return day;
  }
  throw ForecastError("forecast payload holds no entry for " + format_date(date));
}

std::string render_daily_forecast(std::span<const ForecastDay> days) {
  json doc;
  doc["owner"] = "IPMA";
  doc["country"] = "PT";
  doc["data"] = json::array();
  for (const auto& d : days) {
    doc["data"].push_back({{"forecastDate", format_date(d.date)}, {"idWeatherType", d.weather_type_id}});
  }
  if (!days.empty()) doc["globalIdLocal"] = days.front().region_id;
  return doc.dump(2) + "\n";
}

std::string read_forecast_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ForecastError("cannot open forecast fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ForecastDay load_forecast_fixture(const std::filesystem::path& path, int region_id, Date date) {
  return select_forecast_day(read_forecast_fixture(path), region_id, date);
}

std::string fetch_forecast_payload(int region_id, std::string_view endpoint_base, const HttpOptions& options) {
  const Endpoint endpoint = split_endpoint(endpoint_base);
  std::string path = options.path_template;
  if (const auto pos = path.find("{region_id}"); pos != std::string::npos)
    path.replace(pos, std::string_view("{region_id}").size(), std::to_string(region_id));
  if (path.empty() || path.front() != '/') path.insert(path.begin(), '/');
  path = endpoint.prefix + path;

  // httplib rejects some schemes (https without TLS support) by throwing.
  std::unique_ptr<httplib::Client> holder;
  try {
    holder = std::make_unique<httplib::Client>(endpoint.scheme_host_port);
  } catch (const std::exception& e) {
    throw ForecastError("unsupported forecast endpoint " + std::string(endpoint_base) + ": " + e.what());
  }
  httplib::Client& client = *holder;
  if (!client.is_valid()) throw ForecastError("unsupported forecast endpoint " + std::string(endpoint_base));
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
  client.set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));

  const int attempts = std::max(0, options.retries) + 1;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Get(path);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_error = "HTTP status " + std::to_string(res->status);
  }
  throw NetworkError("forecast request " + endpoint.scheme_host_port + path + " failed after " +
                         std::to_string(attempts) + " attempts: " + last_error,
                     attempts);
}

ForecastDay fetch_daily_forecast(int region_id, std::string_view endpoint_base, Date date,
                                 const HttpOptions& options) {
  return select_forecast_day(fetch_forecast_payload(region_id, endpoint_base, options), region_id, date);
}

}  // namespace vrfb
