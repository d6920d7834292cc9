#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

namespace vrfb::app {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

constexpr auto kSunrise = 8h;
constexpr auto kSunset = 17h + 30min;
constexpr double kPeakW = 4'200.0;

// Portable uniform draw; std::uniform_real_distribution is implementation-defined.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct CloudSegment {
  Timestamp until;
  double factor;
};

std::vector<CloudSegment> cloud_schedule(Timestamp day_start, std::mt19937_64& rng) {
  std::vector<CloudSegment> out;
  Timestamp t = day_start + kSunrise - 30min;
  const Timestamp end = day_start + kSunset + 30min;
  bool sunny = true;
  while (t < end) {
    const auto dwell = Seconds{static_cast<std::int64_t>(uniform(rng, 60.0, 900.0)) / 2 * 2};
    const double factor = sunny ? 1.0 : uniform(rng, 0.25, 0.60);
    t += dwell;
    out.push_back({t, factor});
    sunny = !sunny;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_series(const fs::path& path, const PowerSeries& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_power_csv(out, s);
}

}  // namespace

double clear_sky_power(Timestamp t, double peak_w) {
  const auto tod = t - std::chrono::floor<std::chrono::days>(t);
  if (tod <= kSunrise || tod >= kSunset) return 0.0;
  const double x = std::chrono::duration<double>(tod - kSunrise).count() /
                   std::chrono::duration<double>(kSunset - kSunrise).count();
  return peak_w * std::sin(std::numbers::pi * x);
}

PowerSeries make_fluctuating_pv(Date first_day, int days, Seconds step, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Timestamp start = std::chrono::sys_days{first_day};
  const auto per_day = static_cast<std::size_t>(std::chrono::seconds{24h} / step);
  std::vector<double> values;
  values.reserve(per_day * static_cast<std::size_t>(days));
  for (int d = 0; d < days; ++d) {
    const Timestamp day_start = start + std::chrono::days{d};
    const auto schedule = cloud_schedule(day_start, rng);
    const bool clear_day = d == 5;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < per_day; ++i) {
      const Timestamp t = day_start + step * static_cast<std::int64_t>(i);
      while (seg < schedule.size() && t >= schedule[seg].until) ++seg;
      const double factor = (clear_day || seg >= schedule.size()) ? 1.0 : schedule[seg].factor;
      values.push_back(clear_sky_power(t, kPeakW) * factor);
    }
  }
  return PowerSeries{start, step, std::move(values)};
}

PowerSeries make_smooth_pv(Date first_day, int days, Seconds step) {
  const Timestamp start = std::chrono::sys_days{first_day};
  const auto n = static_cast<std::size_t>(std::chrono::seconds{24h} / step) * static_cast<std::size_t>(days);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = clear_sky_power(start + step * static_cast<std::int64_t>(i), kPeakW);
  return PowerSeries{start, step, std::move(values)};
}

PowerSeries make_load_profile(Date first_day, int days, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Timestamp start = std::chrono::sys_days{first_day};
  const auto n = static_cast<std::size_t>(96 * days + 1);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hour = static_cast<double>(i % 96) / 4.0;
    double base = 1'600.0;
    if (hour < 6.0) {
      base = 1'100.0;
    } else if (hour < 8.0) {
      base = 1'800.0;
    } else if (hour < 12.0) {
      base = 2'800.0;
    } else if (hour < 14.0) {
      base = 3'200.0;
    } else if (hour < 18.0) {
      base = 2'700.0;
    } else if (hour < 22.0) {
      base = 3'600.0;
    }
    values[i] = base * uniform(rng, 0.9, 1.1);
  }
  return PowerSeries{start, Seconds{900}, std::move(values)};
}

std::vector<ForecastDay> make_forecast(Date first_day, const std::vector<int>& weather_type_ids, int region_id) {
  std::vector<ForecastDay> out;
  const std::chrono::sys_days first{first_day};
  for (std::size_t i = 0; i < weather_type_ids.size(); ++i) {
    out.push_back({Date{first + std::chrono::days{static_cast<int>(i)}}, weather_type_ids[i], region_id});
  }
  return out;
}

std::vector<std::string> write_fixture_corpus(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto note = [&](const char* name) {
    written.emplace_back(name);
    return dir / name;
  };

  write_series(note("pv_fluctuating_7d.csv"), make_fluctuating_pv(kFixtureFirstDay, 7, Seconds{2}));
  write_series(note("pv_smooth_1d.csv"), make_smooth_pv(kFixtureFirstDay, 1, Seconds{2}));
  write_series(note("load_15min_7d.csv"), make_load_profile(kFixtureFirstDay, 7));

  // Night charge active on days 2-5, inactive on days 1, 6 and 7.
  write_text(note("forecast_week.json"), render_daily_forecast(make_forecast(kFixtureFirstDay, {2, 4, 5, 14, 16, 1, 3})));
  write_text(note("forecast_cloudy.json"), render_daily_forecast(make_forecast(kFixtureFirstDay, std::vector<int>(7, 4))));
  write_text(note("forecast_clear.json"), render_daily_forecast(make_forecast(kFixtureFirstDay, std::vector<int>(7, 1))));

  nlohmann::ordered_json cfg;
  cfg["pv_path"] = "pv_fluctuating_7d.csv";
  cfg["load_path"] = "load_15min_7d.csv";
  cfg["strategy"] = "SCM_RR_WF";
  cfg["battery"] = {{"energy_capacity_wh", 60000}, {"power_nominal_w", 5000}, {"soc_min", 0.2},
                    {"soc_max", 0.7},            {"eta_acdc", 0.88},        {"standby_power_w", 30},
                    {"derate_band", 0.05},       {"initial_soc", 0.35}};
  cfg["ems"] = {{"night_charge_power_w", 2700},
                {"soc_target", 0.5},
                {"charge_start_time", "01:30"},
                {"utc_offset_h", 0},
                {"ramp", {{"nameplate_w", 6740}, {"limit_pct_per_min", 10}, {"window_s", 20}, {"tick_s", 2}}}};
  cfg["forecast"] = {{"mode", "fixture"},
                     {"fixture_path", "forecast_week.json"},
                     {"region_id", kFixtureRegionId},
                     {"charge_ids", {4, 5, 14, 16, 17, 18}},
                     {"unknown_behavior", "no_charge"}};
  cfg["ramp_analysis"] = {{"windows_s", {2, 20, 60, 300, 900}}};
  cfg["out_dir"] = "out";
  write_text(note("config.json"), cfg.dump(2) + "\n");
  return written;
}

}  // namespace vrfb::app
