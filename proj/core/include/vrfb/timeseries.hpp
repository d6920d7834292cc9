#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vrfb {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Raised for malformed profile files. Carries the 1-based line number when
/// the problem is tied to a row (0 otherwise).
class CsvError : public std::runtime_error {
public:
  CsvError(std::string source, std::size_t line, const std::string& what);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string source_;
  std::size_t line_;
};

struct PowerSample {
  Timestamp timestamp;
  double power_w = 0.0;
};

/// Uniformly sampled power signal in watts. value(i) is the power at
/// start() + i * step().
class PowerSeries {
public:
  PowerSeries(Timestamp start, Seconds step, std::vector<double> values);

  Timestamp start() const noexcept { return start_; }
  Seconds step() const noexcept { return step_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Timestamp time_at(std::size_t i) const noexcept {
    return start_ + step_ * static_cast<std::int64_t>(i);
  }
  /// Timestamp of the last sample.
  Timestamp last_time() const noexcept { return time_at(values_.size() - 1); }

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

private:
  Timestamp start_;
  Seconds step_;
  std::vector<double> values_;
};

enum class PowerUnit { watt, kilowatt };
enum class ResampleMethod { hold, linear };

struct ResamplePolicy {
  ResampleMethod method = ResampleMethod::hold;
  /// Largest source sample spacing the resampler will bridge.
  Seconds gap_limit{3600};
};

struct CsvReadOptions {
  PowerUnit unit = PowerUnit::watt;
  /// Multiplier applied after unit conversion (maps normalized profiles to W).
  double scale = 1.0;
  /// Header name of the value column. Empty selects the second column.
  std::string column;
  /// Step used when the file holds a single row.
  std::optional<Seconds> step_hint;
};

/// Parses `2018-01-01T00:00:00Z` (the `Z` is optional, a space may replace
/// `T`) or integer epoch seconds.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

PowerSeries load_power_csv(const std::filesystem::path& path, PowerUnit unit = PowerUnit::watt);
PowerSeries load_power_csv(const std::filesystem::path& path, const CsvReadOptions& options);
PowerSeries read_power_csv(std::istream& in, const CsvReadOptions& options,
                           std::string_view source_name = "<stream>");

void write_power_csv(std::ostream& out, const PowerSeries& series);

/// Resamples onto a grid starting at series.start() with `target_step`,
/// covering [start, last_time()].
PowerSeries resample(const PowerSeries& series, Seconds target_step, const ResamplePolicy& policy);

/// Brings both series onto the finer of the two grids over their common
/// time span.
std::pair<PowerSeries, PowerSeries> align(const PowerSeries& a, const PowerSeries& b,
                                          ResampleMethod method = ResampleMethod::hold);

/// Trapezoidal energy in watt-hours.
double trapezoid_energy_wh(const PowerSeries& series);

}  // namespace vrfb
