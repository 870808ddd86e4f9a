#pragma once

#include <deque>
#include <optional>
#include <string>

#include "catlock/params.hpp"

namespace catlock {

enum class ControllerMode { dormant, cooling, heating };
enum class Extremum { minimum, maximum };

std::string to_string(ControllerMode mode);
ControllerMode mode_from_string(const std::string& name);

/// Times are in units of 1/nu.
struct ControllerConfig {
  double epsilon = 0.2;                        // modulation depth of ω²
  double smoothing_width = 0.01 * kTwoPi;      // moving-average width
  double lookback = 0.05 * kTwoPi;             // quadratic-fit window
  double refractory = 0.15 * kTwoPi;           // minimum spacing of detections
  double curvature_floor = 1e-3;               // |fitted rise over half a window| needed to report
  double n_high = 25.0;                        // cool above
  double n_low = 16.0;                         // heat below
  double n_dormant_high = 20.0;                // active modes stop inside (n_low, n_dormant_high)
};

struct ExtremumEvent {
  Extremum kind = Extremum::minimum;
  double t_vertex = 0.0;  // fitted extremum time
  double t_detect = 0.0;  // time of the sample that triggered detection
};

/// Extremum-triggered parametric drive. Feed it the filter's <x²> and <n>
/// once per step; it answers with the ω² multiplier to hold until the next
/// detected extremum.
class FeedbackController {
 public:
  explicit FeedbackController(ControllerConfig config = {});

  /// Pushes a sample, updates the smoothed series and the mode.
  void ingest(double t, double x2_e, double n_e);
  /// Quadratic fit over the look-back window of the smoothed series.
  std::optional<ExtremumEvent> detect_extremum();
  /// Multiplier for the given event in the current mode; held when no event.
  double command(const std::optional<ExtremumEvent>& event);

  /// ingest + detect + command.
  double update(double t, double x2_e, double n_e);

  ControllerMode mode() const { return mode_; }
  double multiplier() const { return multiplier_; }
  const ControllerConfig& config() const { return config_; }
  void force_mode(ControllerMode mode) { set_mode(mode); }

 private:
  struct Sample {
    double t;
    double y;
  };

  void set_mode(ControllerMode mode);

  ControllerConfig config_;
  ControllerMode mode_ = ControllerMode::dormant;
  double multiplier_ = 1.0;
  std::deque<Sample> raw_;
  double raw_sum_ = 0.0;
  double raw_tsum_ = 0.0;
  double latest_t_ = 0.0;
  std::deque<Sample> smoothed_;
  std::optional<double> last_detection_;
};

}  // namespace catlock
