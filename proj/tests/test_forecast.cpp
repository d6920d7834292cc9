#include <doctest.h>

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include <httplib.h>

#include "vrfb/forecast.hpp"

using namespace vrfb;
using namespace std::chrono_literals;

namespace {

const Date kDay{std::chrono::year{2018}, std::chrono::January, std::chrono::day{3}};

const char* kPayload = R"({
  "owner": "IPMA",
  "country": "PT",
  "data": [
    {"precipitaProb": "0.0", "tMin": "5.1", "tMax": "14.2", "predWindDir": "NW",
     "idWeatherType": 1, "classWindSpeed": 1, "longitude": "-7.9072",
     "forecastDate": "2018-01-02", "latitude": "38.5701"},
    {"precipitaProb": "80.0", "tMin": "7.0", "tMax": "12.0", "predWindDir": "S",
     "idWeatherType": 4, "classWindSpeed": 2, "longitude": "-7.9072",
     "forecastDate": "2018-01-03", "latitude": "38.5701"}
  ],
  "globalIdLocal": 1070500,
  "dataUpdate": "2018-01-02T10:02:03"
})";

// Local HTTP server on an ephemeral port, stopped on scope exit.
class TestServer {
public:
  TestServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

int unused_port() {
  httplib::Server s;
  return s.bind_to_any_port("127.0.0.1");
}

}  // namespace

TEST_CASE("weather type table has all 29 codes") {
  const auto types = weather_types();
  CHECK(types.size() == 29);
  std::set<int> ids;
  for (const auto& t : types) ids.insert(t.id);
  CHECK(ids.size() == 29);
  CHECK(ids.count(-99) == 1);
  for (int id = 0; id <= 27; ++id) CHECK(is_known_weather_type(id));
  CHECK_FALSE(is_known_weather_type(28));
  CHECK(weather_type_description(4) == "Cloudy");
  CHECK(weather_type_description(1) == "Clear sky");
}

TEST_CASE("default decision table") {
  const ChargeDecisionPolicy policy;
  const std::set<int> charge{4, 5, 14, 16, 17, 18};
  for (const auto& t : weather_types()) {
    const bool want = charge.count(t.id) == 1;
    CHECK_MESSAGE(should_night_charge({kDay, t.id, 1}, policy) == want, "code ", t.id);
  }
  CHECK_FALSE(should_night_charge({kDay, 99, 1}, policy));
}

TEST_CASE("unknown behavior is configurable") {
  ChargeDecisionPolicy policy;
  policy.unknown_behavior = UnknownBehavior::charge;
  CHECK(should_night_charge({kDay, -99, 1}, policy));
  CHECK(should_night_charge({kDay, 0, 1}, policy));
  CHECK(should_night_charge({kDay, 42, 1}, policy));
  CHECK_FALSE(should_night_charge({kDay, 1, 1}, policy));
  policy.charge_ids = {1};
  CHECK(should_night_charge({kDay, 1, 1}, policy));
  CHECK_FALSE(should_night_charge({kDay, 4, 1}, policy));
}

TEST_CASE("dates") {
  CHECK(format_date(kDay) == "2018-01-03");
  CHECK(parse_date("2018-01-03") == kDay);
  CHECK_THROWS_AS(parse_date("2018-02-30"), ForecastError);
  CHECK_THROWS_AS(parse_date("03/01/2018"), ForecastError);
}

TEST_CASE("payload parsing") {
  const auto days = parse_daily_forecast(kPayload, 0);
  REQUIRE(days.size() == 2);
  CHECK(days[1] == ForecastDay{kDay, 4, 1070500});
  CHECK(select_forecast_day(kPayload, 0, kDay).weather_type_id == 4);
  CHECK_THROWS_AS(select_forecast_day(kPayload, 0, Date{std::chrono::year{2019} / 1 / 1}), ForecastError);
  CHECK_THROWS_AS(parse_daily_forecast("{not json", 0), ForecastError);
  CHECK_THROWS_AS(parse_daily_forecast(R"({"nodata":[]})", 0), ForecastError);
  CHECK_THROWS_AS(parse_daily_forecast(R"({"data":[{"forecastDate":"2018-01-01"}]})", 0), ForecastError);
  // region falls back to the argument
  CHECK(parse_daily_forecast(R"({"data":[{"forecastDate":"2018-01-01","idWeatherType":2}]})", 7)[0].region_id == 7);
}

TEST_CASE("render then parse round-trips") {
  const std::vector<ForecastDay> days{{kDay, 4, 1070500}, {Date{std::chrono::year{2018} / 1 / 4}, 1, 1070500}};
  CHECK(parse_daily_forecast(render_daily_forecast(days), 0) == days);
}

TEST_CASE("live fetch matches the fixture byte for byte") {
  TestServer srv;
  std::string path_seen;
  srv.server().Get(R"(/forecast/(\d+)\.json)", [&](const httplib::Request& req, httplib::Response& res) {
    path_seen = req.path;
    res.set_content(kPayload, "application/json");
  });
  const std::string live = fetch_forecast_payload(1070500, srv.base() + "/forecast", {});
  CHECK(path_seen == "/forecast/1070500.json");
  CHECK(live == kPayload);
  CHECK(parse_daily_forecast(live, 0) == parse_daily_forecast(kPayload, 0));
  CHECK(fetch_daily_forecast(1070500, srv.base() + "/forecast", kDay) == select_forecast_day(kPayload, 0, kDay));
}

TEST_CASE("retries recover from transient errors") {
  TestServer srv;
  std::atomic<int> calls{0};
  srv.server().Get(R"(/(\d+)\.json)", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      return;
    }
    res.set_content(kPayload, "application/json");
  });
  HttpOptions opts;
  opts.retries = 2;
  CHECK(fetch_forecast_payload(1070500, srv.base(), opts) == kPayload);
  CHECK(calls == 3);

  calls = 0;
  opts.retries = 1;
  try {
    fetch_forecast_payload(1070500, srv.base(), opts);
    FAIL("expected NetworkError");
  } catch (const NetworkError& e) {
    CHECK(e.attempts() == 2);
  }
}

TEST_CASE("unreachable endpoint raises NetworkError after all attempts") {
  HttpOptions opts;
  opts.retries = 2;
  opts.timeout = 500ms;
  const std::string base = "http://127.0.0.1:" + std::to_string(unused_port());
  try {
    fetch_forecast_payload(1070500, base, opts);
    FAIL("expected NetworkError");
  } catch (const NetworkError& e) {
    CHECK(e.attempts() == 3);
  }
  CHECK_THROWS_AS(fetch_forecast_payload(1, "ftp://example.invalid", opts), ForecastError);
}
