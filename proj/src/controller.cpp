#include "catlock/controller.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "catlock/errors.hpp"

namespace catlock {

std::string to_string(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::cooling:
      return "cooling";
    case ControllerMode::heating:
      return "heating";
    case ControllerMode::dormant:
      break;
  }
  return "dormant";
}

ControllerMode mode_from_string(const std::string& name) {
  if (name == "cooling") return ControllerMode::cooling;
  if (name == "heating") return ControllerMode::heating;
  if (name == "dormant") return ControllerMode::dormant;
  throw ConfigError("unknown controller mode '" + name + "'");
}

FeedbackController::FeedbackController(ControllerConfig config) : config_(config) {
  if (!(config_.epsilon >= 0.0 && config_.epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!(config_.lookback > 0.0) || !(config_.smoothing_width >= 0.0)) throw ConfigError("controller windows must be positive");
  if (!(config_.n_low <= config_.n_dormant_high && config_.n_dormant_high <= config_.n_high)) {
    throw ConfigError("controller thresholds must satisfy n_low <= n_dormant_high <= n_high");
  }
}

void FeedbackController::set_mode(ControllerMode mode) {
  if (mode == mode_) return;
  mode_ = mode;
  multiplier_ = 1.0;
}

void FeedbackController::ingest(double t, double x2_e, double n_e) {
  if (!raw_.empty() && t < raw_.back().t) throw UsageError("FeedbackController::ingest: time went backwards");

  raw_.push_back({t, x2_e});
  raw_sum_ += x2_e;
  raw_tsum_ += t;
  latest_t_ = t;
  while (raw_.size() > 1 && t - raw_.front().t > config_.smoothing_width) {
    raw_sum_ -= raw_.front().y;
    raw_tsum_ -= raw_.front().t;
    raw_.pop_front();
  }
  // stamp the average at the window centre, otherwise every vertex lags by half a width
  const double count = static_cast<double>(raw_.size());
  smoothed_.push_back({raw_tsum_ / count, raw_sum_ / count});
  // keep one sample at or beyond the window edge so the buffer spans it fully
  while (smoothed_.size() > 2 && smoothed_.back().t - smoothed_[1].t >= config_.lookback) smoothed_.pop_front();

  if (n_e > config_.n_high) {
    set_mode(ControllerMode::cooling);
  } else if (n_e < config_.n_low) {
    set_mode(ControllerMode::heating);
  } else if (mode_ != ControllerMode::dormant && n_e > config_.n_low && n_e < config_.n_dormant_high) {
    set_mode(ControllerMode::dormant);
  }
}

std::optional<ExtremumEvent> FeedbackController::detect_extremum() {
  if (smoothed_.size() < 5) return std::nullopt;
  const double t_end = smoothed_.back().t;
  const double span = t_end - smoothed_.front().t;
  if (span < config_.lookback * (1.0 - 1e-9)) return std::nullopt;
  if (last_detection_ && latest_t_ - *last_detection_ < config_.refractory) return std::nullopt;

  // Least squares for y = a s² + b s + c with s = (t - t_end)/W ∈ [-1, 0].
  const double W = config_.lookback;
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const Sample& smp : smoothed_) {
    const double s = (smp.t - t_end) / W;
    const Eigen::Vector3d basis(s * s, s, 1.0);
    normal += basis * basis.transpose();
    rhs += basis * smp.y;
  }
  Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector3d coef = ldlt.solve(rhs);
  const double a = coef[0];
  const double b = coef[1];
  if (!std::isfinite(a) || !std::isfinite(b)) return std::nullopt;
  // rise of the fitted parabola over half a window, in y units
  if (std::abs(a) * 0.25 <= config_.curvature_floor) return std::nullopt;
  const double s_vertex = -b / (2.0 * a);
  if (s_vertex < -0.5 || s_vertex > 0.0) return std::nullopt;

  last_detection_ = latest_t_;
  return ExtremumEvent{a > 0.0 ? Extremum::minimum : Extremum::maximum, t_end + s_vertex * W, latest_t_};
}

double FeedbackController::command(const std::optional<ExtremumEvent>& event) {
  if (mode_ == ControllerMode::dormant) {
    multiplier_ = 1.0;
    return multiplier_;
  }
  if (!event) return multiplier_;
  const double up = 1.0 + config_.epsilon;
  const double down = 1.0 - config_.epsilon;
  const bool minimum = event->kind == Extremum::minimum;
  if (mode_ == ControllerMode::cooling) {
    multiplier_ = minimum ? up : down;
  } else {
    multiplier_ = minimum ? down : up;
  }
  return multiplier_;
}

double FeedbackController::update(double t, double x2_e, double n_e) {
  ingest(t, x2_e, n_e);
  return command(detect_extremum());
}

}  // namespace catlock
