#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace catlock {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical rates and timing. Dimensionless units: hbar = m = 1 and the
/// effective oscillator frequency nu = 1, so all rates are multiples of nu and
/// all times are in units of 1/nu (one effective period is 2π).
struct PhysicalParams {
  double nu = 1.0;
  double k = 1.0 / (200.0 * std::numbers::pi);  // x̃² measurement strength
  double mu = 1.0;                              // σx measurement strength
  double gamma = 1.0 / 200.0;                   // damping rate, 1/Q_eff
  double n_T = 0.0;                             // thermal occupancy
  double g = 12.5;                              // dispersive coupling
  double dt = 2e-4 * kTwoPi;                    // integrator step
  double corr_interval = kTwoPi;                // time between re-correlations

  /// Duration of the parity correlation window, π/g.
  double tau_corr() const { return std::numbers::pi / g; }
  /// Variance of x̃ (and p̃) in the bath's thermal state.
  double thermal_variance() const { return (2.0 * n_T + 1.0) / 2.0; }

  /// Throws ConfigError on an invariant violation; returns regime warnings.
  std::vector<std::string> validate() const;
};

}  // namespace catlock
