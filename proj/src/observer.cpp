#include "catlock/observer.hpp"

namespace catlock {

Observer::Observer(const ObserverSettings& settings, const EstimatorState& initial)
    : settings_(settings), est_(initial), controller_(settings.controller) {
  settings_.filter.n_T = settings_.physics.n_T;
}

double Observer::observe(const RecordSample& sample) {
  const PhysicalParams& ph = settings_.physics;
  const double omega_sq = multiplier_;

  // Between records the moments still rotate; only the measurement terms drop out.
  if (sample.x2_active) {
    const double dV = innovation_x2(sample.dr, est_, ph.k, sample.dt, settings_.filter.chi_cut);
    resets_ += update_filter(est_, dV, ph.k, sample.dt, omega_sq, settings_.filter);
  } else {
    resets_ += update_filter(est_, 0.0, 0.0, sample.dt, omega_sq, settings_.filter);
  }
  if (sample.qubit_active) update_qubit_channel(est_, sample.dr_x, ph.mu, sample.dt);

  ParityDecay decay = settings_.qubit_tracking ? ParityDecay::qubit_correlation : ParityDecay::mixing_probability;
  if (sample.correlating) decay = ParityDecay::none;
  update_damping(est_, ph.gamma, ph.n_T, sample.dt, decay);
  resets_ += robustness_pass(est_, settings_.filter);

  if (settings_.feedback) {
    multiplier_ = controller_.update(sample.t, x2_estimate(), number_estimate());
  }
  return multiplier_;
}

void Observer::recorrelate(double tau) {
  const PhysicalParams& ph = settings_.physics;
  catlock::recorrelate(est_, ph.gamma, ph.n_T, tau);
  robustness_pass(est_, settings_.filter);
}

}  // namespace catlock
