#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vrfb/forecast.hpp"
#include "vrfb/timeseries.hpp"

namespace vrfb::app {

/// Synthetic January week used by the bundled corpus (2018-01-01..07 UTC).
inline constexpr Date kFixtureFirstDay{std::chrono::year{2018}, std::chrono::January, std::chrono::day{1}};
inline constexpr int kFixtureRegionId = 1070500;
inline constexpr std::uint64_t kFixtureSeed = 20180101;

/// Clear-sky winter bell from 08:00 to 17:30 UTC with `peak_w` at solar noon.
double clear_sky_power(Timestamp t, double peak_w);

/// Clear-sky envelope modulated by a cloud square wave: dwell times of
/// 60-900 s alternate between full sun and a 25-60 % cloud factor, so every
/// transition is an instantaneous one-tick step. Day index 5 stays clear.
PowerSeries make_fluctuating_pv(Date first_day, int days, Seconds step, std::uint64_t seed = kFixtureSeed);

/// Clear-sky days only (no ramp violations at the default limit).
PowerSeries make_smooth_pv(Date first_day, int days, Seconds step);

/// 15-minute building load, one trailing sample past the last day so that a
/// held profile covers the full final interval.
PowerSeries make_load_profile(Date first_day, int days, std::uint64_t seed = kFixtureSeed);

/// One forecast entry per day with the given weather-type ids.
std::vector<ForecastDay> make_forecast(Date first_day, const std::vector<int>& weather_type_ids,
                                       int region_id = kFixtureRegionId);

/// Writes the corpus: PV/load CSVs, forecast payloads and a ready-to-run
/// config. Returns the written file names.
std::vector<std::string> write_fixture_corpus(const std::filesystem::path& dir);

}  // namespace vrfb::app
