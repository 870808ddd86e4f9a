#pragma once

namespace catlock {

/// The observer's six-parameter filter state plus qubit bookkeeping.
///
/// The state model is an incoherent mixture, with weight P, of the even and
/// odd superpositions of two pure Gaussian packets centred at ±(x, p) with
/// variances Vx, Vp and symmetrized covariance C. P_plus is the probability
/// that the qubit is in |+>, beta the probability that qubit and oscillator
/// parity disagree.
struct EstimatorState {
  double x = 0.0;
  double p = 0.0;
  double Vx = 0.5;
  double Vp = 0.5;
  double C = 0.0;
  double P = 0.5;
  double P_plus = 0.5;
  double beta = 0.0;

  double parity() const { return 2.0 * P - 1.0; }
};

/// Closed-form Gaussian overlap χ = Re<G+|G-> and the cat moments <±|x̃²|±>.
struct CatMoments {
  double chi = 0.0;
  double x2_even = 0.0;
  double x2_odd = 0.0;
};

CatMoments cat_moments(double x, double p, double Vx, double Vp, double C);

struct FilterSettings {
  double chi_cut = 1e-8;   // below this overlap the packets count as well separated
  double n_T = 0.0;        // sets the reset variances
  double variance_ceiling = 6.0;  // 12 × ground-state variance
};

/// Filter-side <x̃²>: the P-weighted cat moment when the packets overlap, else Vx + x².
double estimated_x2(const EstimatorState& est, double chi_cut = 1e-8);
/// <a†a> of the Gaussian-mixture estimate, (Vx + x² + Vp + p² - 1)/2.
double estimated_number(const EstimatorState& est);
/// The bracket driving qubit decorrelation: Vx + x² + Vp + p² - 1.
double damping_bracket(const EstimatorState& est);

/// Clamps an innovation to ±4√dt.
double truncate_innovation(double raw, double dt);

/// dV = dr/√(2k) - √(8k) <x̃²>_e dt, truncated at 4 standard deviations.
double innovation_x2(double dr, const EstimatorState& est, double k, double dt, double chi_cut = 1e-8);

/// Coefficient of dV in the dP equation: √(8k) (<x²>_+ - <x²>_-) P (1 - P).
double parity_gain(const EstimatorState& est, double k, double chi_cut = 1e-8);

/// One Euler-Maruyama step of the six filter equations (m = hbar = 1, ω² =
/// omega_sq) followed by the robustness pass. The dP change is folded into
/// P_plus so a following qubit-channel update keeps it. Returns true if the
/// robustness pass reset the variances.
bool update_filter(EstimatorState& est, double dV, double k, double dt, double omega_sq, const FilterSettings& settings);

/// Continuous σx readout: dP+ = √(2μ) P+ (1 - P+) dU, then P from (P+, β).
void update_qubit_channel(EstimatorState& est, double dr_x, double mu, double dt);

/// What the damping update does to the parity bookkeeping.
enum class ParityDecay {
  qubit_correlation,   // β relaxes toward 1/2 and P follows from (P+, β)
  mixing_probability,  // no qubit: P itself relaxes toward 1/2
  none,                // moments only (inside correlation windows)
};

/// Damping of the moments toward the thermal state plus the parity decay.
/// The decay rate is γ times the damping bracket (= 2<n>_e).
void update_damping(EstimatorState& est, double gamma, double n_T, double dt,
                    ParityDecay decay = ParityDecay::qubit_correlation);

/// End of a correlation window of length tau: P relaxes toward 1/2 at the
/// damping-bracket rate, then β = 0 and P_plus = P.
void recorrelate(EstimatorState& est, double gamma, double n_T, double tau);

/// Resets (Vx, Vp, C) when the variances leave the physical region and clamps
/// the probabilities. Returns true when a reset happened.
bool robustness_pass(EstimatorState& est, const FilterSettings& settings);

}  // namespace catlock
