#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vrfb/timeseries.hpp"

using namespace vrfb;
using namespace std::chrono_literals;

namespace {

PowerSeries read(const std::string& text, CsvReadOptions opts = {}) {
  std::istringstream in(text);
  return read_power_csv(in, opts, "test.csv");
}

std::size_t error_line(const std::string& text, CsvReadOptions opts = {}) {
  try {
    read(text, opts);
  } catch (const CsvError& e) {
    return e.line();
  }
  FAIL("expected CsvError");
  return 0;
}

const Timestamp t0 = *parse_timestamp("2018-01-01T00:00:00Z");

}  // namespace

TEST_CASE("timestamps parse in every accepted form") {
  CHECK(parse_timestamp("2018-01-01T00:00:00Z") == t0);
  CHECK(parse_timestamp("2018-01-01T00:00:00") == t0);
  CHECK(parse_timestamp("2018-01-01 00:00:00") == t0);
  CHECK(parse_timestamp("1514764800") == t0);
  CHECK_FALSE(parse_timestamp("2018-13-01T00:00:00Z"));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK(format_timestamp(t0 + 3661s) == "2018-01-01T01:01:01Z");
}

TEST_CASE("format_number round-trips") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2700) == "2700");
}

TEST_CASE("csv with and without header") {
  const auto a = read("timestamp,power\n2018-01-01T00:00:00Z,1\n2018-01-01T00:00:02Z,2\n");
  const auto b = read("2018-01-01T00:00:00Z,1\n2018-01-01T00:00:02Z,2\n");
  CHECK(a == b);
  CHECK(a.step() == 2s);
  CHECK(a.start() == t0);
  CHECK(a.size() == 2);
}

TEST_CASE("csv unit, scale and column selection") {
  CsvReadOptions kw;
  kw.unit = PowerUnit::kilowatt;
  CHECK(read("t,p\n0,1.5\n2,2\n", kw)[0] == doctest::Approx(1500.0));

  CsvReadOptions scaled;
  scaled.scale = 4000.0;
  CHECK(read("t,p\n0,0.5\n2,1\n", scaled)[0] == doctest::Approx(2000.0));

  CsvReadOptions col;
  col.column = "load";
  const auto s = read("timestamp,pv,load\n0,10,20\n2,11,21\n", col);
  CHECK(s[1] == 21.0);
}

TEST_CASE("csv errors carry line numbers") {
  CHECK(error_line("t,p\n0,1\n2,abc\n") == 3);
  CHECK(error_line("t,p\n0,1\n2,nan\n") == 3);
  CHECK(error_line("t,p\n0,1\n2,inf\n") == 3);
  CHECK(error_line("t,p\n0,1\n0,2\n") == 3);
  CHECK(error_line("t,p\n4,1\n2,2\n") == 3);
  CHECK(error_line("t,p\n0,1\n2,2\n5,3\n") == 4);
  CHECK(error_line("t,p\n0,1\nbogus,2\n") == 3);
}

TEST_CASE("csv with a single row needs a step hint") {
  CHECK_THROWS_AS(read("t,p\n0,1\n"), CsvError);
  CsvReadOptions opts;
  opts.step_hint = 2s;
  CHECK(read("t,p\n0,1\n", opts).size() == 1);
  CHECK_THROWS_AS(read("t,p\n"), CsvError);
}

TEST_CASE("write then read is lossless") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 7000.0);
  std::vector<double> v(500);
  for (auto& x : v) x = u(rng);
  const PowerSeries s{t0, 2s, v};
  std::stringstream io;
  write_power_csv(io, s);
  CHECK(read_power_csv(io, {}) == s);
}

TEST_CASE("hold resampling preserves interval energy") {
  const PowerSeries coarse{t0, 900s, {1000.0, 2000.0, 3000.0}};
  const auto fine = resample(coarse, 2s, {});
  CHECK(fine.step() == 2s);
  CHECK(fine.last_time() == coarse.last_time());
  CHECK(fine.size() == 901);
  CHECK(fine[0] == 1000.0);
  CHECK(fine[449] == 1000.0);
  CHECK(fine[450] == 2000.0);
  CHECK(fine[900] == 3000.0);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < fine.size(); ++i) sum += fine[i] * 2.0 / 3600.0;
  CHECK(sum == doctest::Approx((1000.0 + 2000.0) * 0.25));
}

TEST_CASE("linear resampling interpolates") {
  const PowerSeries coarse{t0, 10s, {0.0, 100.0}};
  const auto fine = resample(coarse, 2s, {ResampleMethod::linear, 3600s});
  REQUIRE(fine.size() == 6);
  for (std::size_t i = 0; i < fine.size(); ++i) CHECK(fine[i] == doctest::Approx(20.0 * static_cast<double>(i)));
}

TEST_CASE("resample refuses gaps beyond the limit") {
  const PowerSeries coarse{t0, 7200s, {1.0, 2.0}};
  CHECK_THROWS_AS(resample(coarse, 2s, {}), std::invalid_argument);
  const PowerSeries same{t0, 2s, {1.0, 2.0}};
  CHECK(resample(same, 2s, {}) == same);
}

TEST_CASE("align intersects on the finer grid") {
  const PowerSeries pv{t0 + 4s, 2s, std::vector<double>(100, 5.0)};
  const PowerSeries load{t0, 10s, std::vector<double>(30, 7.0)};
  const auto [a, b] = align(pv, load);
  CHECK(a.step() == 2s);
  CHECK(b.step() == 2s);
  CHECK(a.start() == b.start());
  CHECK(a.size() == b.size());
  CHECK(a.start() >= pv.start());
  CHECK(a.last_time() <= pv.last_time());
  CHECK(b[0] == 7.0);
}

TEST_CASE("trapezoid energy") {
  const PowerSeries s{t0, 3600s, {0.0, 1000.0, 1000.0}};
  CHECK(trapezoid_energy_wh(s) == doctest::Approx(1500.0));
}

TEST_CASE("series construction validates") {
  CHECK_THROWS_AS(PowerSeries(t0, 0s, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSeries(t0, 2s, {}), std::invalid_argument);
  CHECK_THROWS_AS(PowerSeries(t0, 2s, {std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
}
