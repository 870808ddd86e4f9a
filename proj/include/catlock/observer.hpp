#pragma once

#include "catlock/controller.hpp"
#include "catlock/engine.hpp"
#include "catlock/estimator.hpp"
#include "catlock/params.hpp"

namespace catlock {

struct ObserverSettings {
  PhysicalParams physics;
  ControllerConfig controller;
  FilterSettings filter;
  bool feedback = true;
  bool qubit_tracking = true;
};

/// Estimator plus feedback controller. Its only inputs are measurement
/// record samples and configuration; it never sees the true state.
class Observer {
 public:
  Observer(const ObserverSettings& settings, const EstimatorState& initial);

  /// Consumes one record sample (the step was taken under multiplier()) and
  /// returns the multiplier for the next step.
  double observe(const RecordSample& sample);

  /// Closes a correlation window of length tau.
  void recorrelate(double tau);

  const EstimatorState& estimate() const { return est_; }
  const FeedbackController& controller() const { return controller_; }
  double multiplier() const { return multiplier_; }
  double x2_estimate() const { return estimated_x2(est_, settings_.filter.chi_cut); }
  double number_estimate() const { return estimated_number(est_); }
  int resets() const { return resets_; }

 private:
  ObserverSettings settings_;
  EstimatorState est_;
  FeedbackController controller_;
  double multiplier_ = 1.0;
  int resets_ = 0;
};

}  // namespace catlock
