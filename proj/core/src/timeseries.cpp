#include "vrfb/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vrfb {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double sample_at(const PowerSeries& s, Timestamp t, ResampleMethod method) {
  const std::int64_t offset = (t - s.start()).count();
  const std::int64_t step = s.step().count();
  const auto idx = static_cast<std::size_t>(offset / step);
  const std::int64_t rem = offset % step;
  if (rem == 0 || method == ResampleMethod::hold || idx + 1 >= s.size()) return s[idx];
  const double frac = static_cast<double>(rem) / static_cast<double>(step);
  return s[idx] + (s[idx + 1] - s[idx]) * frac;
}

}  // namespace

CsvError::CsvError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

PowerSeries::PowerSeries(Timestamp start, Seconds step, std::vector<double> values)
    : start_(start), step_(step), values_(std::move(values)) {
  if (step_.count() <= 0) throw std::invalid_argument("PowerSeries step must be positive");
  if (values_.empty()) throw std::invalid_argument("PowerSeries needs at least one value");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("PowerSeries values must be finite");
  }
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  std::int64_t epoch = 0;
  if (parse_int(text, epoch)) return Timestamp{Seconds{epoch}};

  // YYYY-MM-DD[T ]HH:MM:SS[Z]
  if (text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
      !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), s)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} + Seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

PowerSeries load_power_csv(const std::filesystem::path& path, PowerUnit unit) {
  CsvReadOptions options;
  options.unit = unit;
  return load_power_csv(path, options);
}

PowerSeries load_power_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw CsvError(path.string(), 0, "cannot open file");
  return read_power_csv(in, options, path.string());
}

PowerSeries read_power_csv(std::istream& in, const CsvReadOptions& options, std::string_view source_name) {
  const std::string source{source_name};
  const double factor = (options.unit == PowerUnit::kilowatt ? 1000.0 : 1.0) * options.scale;

  std::vector<PowerSample> rows;
  std::vector<std::size_t> row_lines;
  std::size_t value_col = 1;
  bool header_allowed = true;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (view.empty()) continue;

    const auto fields = split_commas(view);
    auto ts = parse_timestamp(fields[0]);
    if (!ts && header_allowed) {
      header_allowed = false;
      if (!options.column.empty()) {
        auto it = std::find(fields.begin(), fields.end(), options.column);
        if (it == fields.end()) throw CsvError(source, line_no, "column '" + options.column + "' not in header");
        value_col = static_cast<std::size_t>(it - fields.begin());
      }
      continue;
    }
    header_allowed = false;
    if (!ts) throw CsvError(source, line_no, "malformed timestamp '" + std::string(fields[0]) + "'");
    if (fields.size() <= value_col) throw CsvError(source, line_no, "missing power column");
    auto power = parse_double(fields[value_col]);
    if (!power) throw CsvError(source, line_no, "malformed power value '" + std::string(fields[value_col]) + "'");
    if (!std::isfinite(*power)) throw CsvError(source, line_no, "power value is not finite");
    if (!rows.empty() && *ts <= rows.back().timestamp) {
      throw CsvError(source, line_no, "timestamps are not strictly increasing");
    }
    rows.push_back({*ts, *power * factor});
    row_lines.push_back(line_no);
  }

  if (rows.empty()) throw CsvError(source, 0, "no data rows");

  Seconds step{0};
  if (rows.size() == 1) {
    if (!options.step_hint) throw CsvError(source, 0, "a single row needs an explicit step");
    step = *options.step_hint;
  } else {
    step = rows[1].timestamp - rows[0].timestamp;
  }

  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].timestamp != rows[0].timestamp + step * static_cast<std::int64_t>(i)) {
      throw CsvError(source, row_lines[i],
                     "irregular sample spacing (expected a uniform " + std::to_string(step.count()) + " s step)");
    }
    values.push_back(rows[i].power_w);
  }
  return PowerSeries{rows[0].timestamp, step, std::move(values)};
}

void write_power_csv(std::ostream& out, const PowerSeries& series) {
  out << "timestamp,power\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_timestamp(series.time_at(i)) << ',' << format_number(series[i]) << '\n';
  }
}

PowerSeries resample(const PowerSeries& series, Seconds target_step, const ResamplePolicy& policy) {
  if (target_step.count() <= 0) throw std::invalid_argument("resample: target step must be positive");
  if (policy.gap_limit < target_step) throw std::invalid_argument("resample: gap_limit must be >= target step");
  if (series.size() > 1 && series.step() > policy.gap_limit) {
    throw std::invalid_argument("resample: sample spacing " + std::to_string(series.step().count()) +
                                " s exceeds gap limit " + std::to_string(policy.gap_limit.count()) + " s");
  }
  if (target_step == series.step()) return series;

  const auto span = (series.last_time() - series.start()).count();
  const auto n = static_cast<std::size_t>(span / target_step.count()) + 1;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = sample_at(series, series.start() + target_step * static_cast<std::int64_t>(k), policy.method);
  }
  return PowerSeries{series.start(), target_step, std::move(out)};
}

std::pair<PowerSeries, PowerSeries> align(const PowerSeries& a, const PowerSeries& b, ResampleMethod method) {
  const PowerSeries& grid_owner = (b.step() < a.step()) ? b : a;
  const Seconds step = grid_owner.step();

  Timestamp begin = std::max(a.start(), b.start());
  const Timestamp end = std::min(a.last_time(), b.last_time());
  if (begin > end) throw std::invalid_argument("align: series do not overlap in time");

  // Snap onto the finer series' sample grid.
  const auto from_owner = (begin - grid_owner.start()).count();
  begin = grid_owner.start() + step * floor_div(from_owner + step.count() - 1, step.count());
  if (begin > end) throw std::invalid_argument("align: overlap holds no sample of the finer grid");

  const auto n = static_cast<std::size_t>((end - begin).count() / step.count()) + 1;
  auto project = [&](const PowerSeries& s) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = sample_at(s, begin + step * static_cast<std::int64_t>(k), method);
    return PowerSeries{begin, step, std::move(out)};
  };
  return {project(a), project(b)};
}

double trapezoid_energy_wh(const PowerSeries& series) {
  const double dt_h = static_cast<double>(series.step().count()) / 3600.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) sum += 0.5 * (series[i - 1] + series[i]) * dt_h;
  return sum;
}

}  // namespace vrfb
