#include "vrfb/ramp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vrfb {

void RampConfig::validate() const {
  if (!(nameplate_w > 0.0)) throw std::invalid_argument("ramp: nameplate_w must be positive");
  if (!(limit_pct_per_min > 0.0)) throw std::invalid_argument("ramp: limit_pct_per_min must be positive");
  if (tick.count() <= 0) throw std::invalid_argument("ramp: tick must be positive");
  if (window.count() <= 0 || window.count() % tick.count() != 0)
    throw std::invalid_argument("ramp: window must be a positive multiple of the tick");
}

double ramp_rate(double p_now_w, double p_prev_w, const RampConfig& cfg, double dt_min) {
  return ((p_now_w - p_prev_w) / cfg.nameplate_w) / dt_min * 100.0;
}

bool violates(double rr_pct_per_min, const RampConfig& cfg) {
  return std::abs(rr_pct_per_min) >= cfg.limit_pct_per_min;
}

MaCommand ma_command(std::span<const double> pv_window, double p_now_w, const RampConfig& cfg) {
  const std::size_t n = cfg.window_samples();
  if (pv_window.size() > n)
    throw std::invalid_argument("ma_command: window holds " + std::to_string(pv_window.size()) +
                                " samples, expected " + std::to_string(n));
  if (pv_window.size() < n) return {0.0, true};
  double sum = 0.0;
  for (double v : pv_window) sum += v;
  return {p_now_w - sum / static_cast<double>(n), false};
}

PvWindow::PvWindow(std::size_t length) : buf_(length, 0.0) {
  if (length == 0) throw std::invalid_argument("PvWindow length must be positive");
}

void PvWindow::push(double sample_w) {
  buf_[head_] = sample_w;
  head_ = (head_ + 1) % buf_.size();
  if (count_ < buf_.size()) ++count_;
}

double PvWindow::mean() const {
  if (count_ == 0) return 0.0;
  const std::size_t cap = buf_.size();
  const std::size_t oldest = (head_ + cap - count_) % cap;
  double sum = 0.0;
  for (std::size_t i = 0; i < count_; ++i) sum += buf_[(oldest + i) % cap];
  return sum / static_cast<double>(count_);
}

std::vector<double> PvWindow::snapshot() const {
  const std::size_t cap = buf_.size();
  const std::size_t oldest = (head_ + cap - count_) % cap;
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = buf_[(oldest + i) % cap];
  return out;
}

RampMonitor::RampMonitor(const RampConfig& cfg) : cfg_(cfg), window_(cfg.window_samples()) {}

RampTick RampMonitor::update(double pv_w) {
  window_.push(pv_w);
  RampTick tick;
  if (!window_.full()) return tick;

  tick.window_full = true;
  tick.pv_average_w = window_.mean();
  tick.ma_command_w = pv_w - tick.pv_average_w;
  if (has_prev_) {
    tick.warmed_up = true;
    tick.rr_pct_per_min = ramp_rate(tick.pv_average_w, prev_avg_, cfg_, cfg_.tick_minutes());
    tick.violated = violates(tick.rr_pct_per_min, cfg_);
  }
  has_prev_ = true;
  prev_avg_ = tick.pv_average_w;
  return tick;
}

double residual_ramp_rate(double shortfall_w, const RampConfig& cfg) {
  return ramp_rate(shortfall_w, 0.0, cfg, cfg.tick_minutes());
}

void RampEventCounter::add(bool violated, double rr_pct_per_min, bool controlled) {
  const int sign = rr_pct_per_min > 0.0 ? 1 : (rr_pct_per_min < 0.0 ? -1 : 0);
  if (!violated) {
    if (in_event_ && event_controlled_) ++controlled_;
    in_event_ = false;
    return;
  }
  if (in_event_ && sign == sign_) {
    event_controlled_ = event_controlled_ && controlled;
    return;
  }
  if (in_event_ && event_controlled_) ++controlled_;
  ++events_;
  in_event_ = true;
  sign_ = sign;
  event_controlled_ = controlled;
}

std::size_t RampEventCounter::events() const { return events_; }

std::size_t RampEventCounter::controlled_events() const {
  return controlled_ + ((in_event_ && event_controlled_) ? 1 : 0);
}

RampHistogram ramp_histogram(const PowerSeries& series, const RampConfig& cfg) {
  const auto step = series.step().count();
  if (60 % step != 0) throw std::invalid_argument("ramp_histogram: series step must divide 60 s");
  const auto per_minute = static_cast<std::size_t>(60 / step);
  if (series.size() <= per_minute) throw std::invalid_argument("ramp_histogram: series shorter than one minute");

  RampHistogram h;
  for (std::size_t i = per_minute; i < series.size(); i += per_minute) {
    const double rr = std::abs(ramp_rate(series[i], series[i - per_minute], cfg, 1.0));
    ++h.minutes;
    if (rr < 5.0) ++h.below_5;
    if (rr >= 5.0) ++h.at_least_5;
    if (rr >= 10.0) ++h.at_least_10;
    if (rr > 10.0) ++h.above_10;
    if (rr >= 50.0) ++h.at_least_50;
  }
  return h;
}

std::vector<SweepRow> window_sweep(const PowerSeries& series, const RampConfig& cfg,
                                   std::span<const Seconds> windows) {
  std::vector<SweepRow> rows;
  rows.reserve(windows.size());
  for (const Seconds w : windows) {
    RampConfig run = cfg;
    run.tick = series.step();
    run.window = w;
    run.validate();

    RampMonitor monitor(run);
    RampEventCounter counter;
    for (double pv : series.values()) {
      const RampTick t = monitor.update(pv);
      // An unconstrained battery delivers the full command: zero shortfall.
      const bool controlled = t.violated && !violates(residual_ramp_rate(0.0, run), run);
      counter.add(t.violated, t.rr_pct_per_min, controlled);
    }
    rows.push_back({w, counter.events(), counter.controlled_events()});
  }
  return rows;
}

}  // namespace vrfb
