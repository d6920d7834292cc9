#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrfb/timeseries.hpp"

namespace vrfb {

struct RampConfig {
  double nameplate_w = 6'740.0;
  double limit_pct_per_min = 10.0;
  Seconds window{20};  // moving-average length
  Seconds tick{2};

  void validate() const;
  std::size_t window_samples() const { return static_cast<std::size_t>(window / tick); }
  double tick_minutes() const { return static_cast<double>(tick.count()) / 60.0; }
};

/// Signed ramp rate in percent of nameplate per minute.
double ramp_rate(double p_now_w, double p_prev_w, const RampConfig& cfg, double dt_min);

/// |rr| >= limit.
bool violates(double rr_pct_per_min, const RampConfig& cfg);

struct MaCommand {
  double command_w = 0.0;  // charge-positive
  bool warming_up = false;
};

/// Battery command that pulls the current PV sample onto the mean of the
/// window (oldest first, current sample last): p_now - mean(window).
/// Returns 0 with warming_up set while the window is not yet full.
MaCommand ma_command(std::span<const double> pv_window, double p_now_w, const RampConfig& cfg);

/// Fixed-length ring of the most recent PV samples.
class PvWindow {
public:
  explicit PvWindow(std::size_t length);

  void push(double sample_w);
  bool full() const noexcept { return count_ == buf_.size(); }
  std::size_t size() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return buf_.size(); }
  /// Mean of the held samples, summed oldest to newest.
  double mean() const;
  /// Copies the held samples oldest first.
  std::vector<double> snapshot() const;

private:
  std::vector<double> buf_;
  std::size_t head_ = 0;  // next write slot
  std::size_t count_ = 0;
};

/// Ramp state of one tick of the averaged PV signal.
struct RampTick {
  bool window_full = false;
  bool warmed_up = false;  // full window and a previous average exist
  double pv_average_w = 0.0;
  double rr_pct_per_min = 0.0;  // tick-to-tick rate of the average
  bool violated = false;
  double ma_command_w = 0.0;
};

/// Feeds PV samples one tick at a time and reports the averaged-signal ramp
/// rate and the moving-average command.
class RampMonitor {
public:
  explicit RampMonitor(const RampConfig& cfg);

  RampTick update(double pv_w);

private:
  RampConfig cfg_;
  PvWindow window_;
  bool has_prev_ = false;
  double prev_avg_ = 0.0;
};

/// Ramp the grid still sees when the battery delivers `shortfall_w` less
/// than the moving-average command, expressed per tick like the detector.
double residual_ramp_rate(double shortfall_w, const RampConfig& cfg);

/// Groups consecutive violating ticks of the same sign into ramp events. An
/// event counts as controlled only if every tick in it was controlled.
class RampEventCounter {
public:
  void add(bool violated, double rr_pct_per_min, bool controlled);
  std::size_t events() const;
  std::size_t controlled_events() const;

private:
  std::size_t events_ = 0;
  std::size_t controlled_ = 0;
  bool in_event_ = false;
  bool event_controlled_ = true;
  int sign_ = 0;
};

struct RampHistogram {
  std::size_t below_5 = 0;
  std::size_t at_least_5 = 0;
  std::size_t at_least_10 = 0;
  std::size_t above_10 = 0;
  std::size_t at_least_50 = 0;
  std::size_t minutes = 0;

  double percent(std::size_t count) const {
    return minutes == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(minutes);
  }
};

/// Histogram of |ramp rate| over consecutive non-overlapping 1-minute
/// differences of the raw series. Buckets overlap: every >= bucket counts all
/// minutes at or above its threshold.
RampHistogram ramp_histogram(const PowerSeries& series, const RampConfig& cfg);

struct SweepRow {
  Seconds window{0};
  std::size_t detected_ramps = 0;
  std::size_t controlled_ramps = 0;
};

/// For each averaging window, replays the moving-average control with an
/// unconstrained battery over the series (tick = series step) and counts the
/// ramp events it detects and neutralizes.
std::vector<SweepRow> window_sweep(const PowerSeries& series, const RampConfig& cfg,
                                   std::span<const Seconds> windows);

}  // namespace vrfb
