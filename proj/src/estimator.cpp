#include "catlock/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace catlock {

namespace {

constexpr double kProbFloor = 1e-6;

// Packets are pure Gaussians ψ±(x) ∝ exp(-(x ∓ x̄)²(1 - 2iC)/(4Vx) ± i p̄ x),
// with ψ-(x) = ψ+(-x). Then
//   <G+|G->     = exp(-x̄²/(2Vx) - 2Vx q²),              q = p̄ - C x̄/Vx
//   <G+|x²|G->  = <G+|G-> (Vx - 4Vx² q²)
// Both are real. Vp only enters through the purity assumption.
struct Overlap {
  double chi;
  double one_minus_chi;
  double q;
};

Overlap gaussian_overlap(double x, double p, double Vx, double C) {
  const double q = p - C * x / Vx;
  const double exponent = -x * x / (2.0 * Vx) - 2.0 * Vx * q * q;
  return {std::exp(exponent), -std::expm1(exponent), q};
}

double clamp_prob(double v) { return std::clamp(v, kProbFloor, 1.0 - kProbFloor); }

}  // namespace

CatMoments cat_moments(double x, double p, double Vx, double /*Vp*/, double C) {
  const double direct = Vx + x * x;
  const Overlap o = gaussian_overlap(x, p, Vx, C);
  if (o.chi >= 1.0 - 1e-12) return {o.chi, direct, direct};
  const double q2 = o.q * o.q;
  const double cross = o.chi * (Vx - 4.0 * Vx * Vx * q2);
  // direct - cross written without cancellation as χ → 1
  const double odd_numerator = Vx * o.one_minus_chi + x * x + 4.0 * o.chi * Vx * Vx * q2;
  return {o.chi, (direct + cross) / (1.0 + o.chi), odd_numerator / o.one_minus_chi};
}

double estimated_x2(const EstimatorState& est, double chi_cut) {
  const CatMoments m = cat_moments(est.x, est.p, est.Vx, est.Vp, est.C);
  if (m.chi <= chi_cut) return est.Vx + est.x * est.x;
  return est.P * m.x2_even + (1.0 - est.P) * m.x2_odd;
}

double damping_bracket(const EstimatorState& est) { return est.Vx + est.x * est.x + est.Vp + est.p * est.p - 1.0; }

double estimated_number(const EstimatorState& est) { return 0.5 * damping_bracket(est); }

double truncate_innovation(double raw, double dt) {
  const double bound = 4.0 * std::sqrt(dt);
  return std::clamp(raw, -bound, bound);
}

double innovation_x2(double dr, const EstimatorState& est, double k, double dt, double chi_cut) {
  const double raw = dr / std::sqrt(2.0 * k) - std::sqrt(8.0 * k) * estimated_x2(est, chi_cut) * dt;
  return truncate_innovation(raw, dt);
}

double parity_gain(const EstimatorState& est, double k, double chi_cut) {
  const CatMoments m = cat_moments(est.x, est.p, est.Vx, est.Vp, est.C);
  if (m.chi <= chi_cut) return 0.0;
  return std::sqrt(8.0 * k) * (m.x2_even - m.x2_odd) * est.P * (1.0 - est.P);
}

bool update_filter(EstimatorState& est, double dV, double k, double dt, double omega_sq, const FilterSettings& settings) {
  const double xi = 2.0 * std::sqrt(8.0 * k);
  const double xi2 = xi * xi;
  const EstimatorState s = est;
  const double x2 = s.x * s.x;

  est.x = s.x + s.p * dt + xi * s.x * s.Vx * dV;
  est.p = s.p - omega_sq * s.x * dt + xi * s.x * s.C * dV;
  est.Vx = s.Vx + (2.0 * s.C - xi2 * x2 * s.Vx * s.Vx) * dt + xi * s.Vx * s.Vx * dV;
  est.C = s.C + (s.Vp - omega_sq * s.Vx - xi2 * x2 * s.Vx * s.C) * dt + xi * s.Vx * s.C * dV;
  est.Vp = s.Vp - 2.0 * omega_sq * s.C * dt + xi * (s.C * s.C - 0.25) * dV +
           xi2 * (0.25 * (s.Vx + 2.0 * x2) - s.C * s.C * x2) * dt;

  const double dP = (k > 0.0 ? parity_gain(s, k, settings.chi_cut) : 0.0) * dV;
  if (dP != 0.0) {
    est.P = std::clamp(s.P + dP, 0.0, 1.0);
    // Keep P = (1-β)P+ + β(1-P+) consistent so the qubit channel does not discard this update.
    const double denom = 1.0 - 2.0 * s.beta;
    if (denom > 1e-3) est.P_plus = std::clamp((est.P - s.beta) / denom, 0.0, 1.0);
  }
  return robustness_pass(est, settings);
}

void update_qubit_channel(EstimatorState& est, double dr_x, double mu, double dt) {
  const double sigma_e = 2.0 * est.P_plus - 1.0;
  const double raw = dr_x / std::sqrt(2.0 * mu) - std::sqrt(8.0 * mu) * sigma_e * dt;
  const double dU = truncate_innovation(raw, dt);
  est.P_plus = std::clamp(est.P_plus + std::sqrt(2.0 * mu) * est.P_plus * (1.0 - est.P_plus) * dU, 0.0, 1.0);
  est.P = (1.0 - est.beta) * est.P_plus + est.beta * (1.0 - est.P_plus);
}

void update_damping(EstimatorState& est, double gamma, double n_T, double dt, ParityDecay decay) {
  const double v_th = (2.0 * n_T + 1.0) / 2.0;
  const double bracket = damping_bracket(est);
  est.x *= 1.0 - 0.5 * gamma * dt;
  est.p *= 1.0 - 0.5 * gamma * dt;
  est.Vx -= gamma * (est.Vx - v_th) * dt;
  est.Vp -= gamma * (est.Vp - v_th) * dt;
  est.C *= 1.0 - 2.0 * gamma * dt;
  switch (decay) {
    case ParityDecay::qubit_correlation:
      est.beta = std::clamp(est.beta - gamma * bracket * (est.beta - 0.5) * dt, 0.0, 0.5);
      est.P = (1.0 - est.beta) * est.P_plus + est.beta * (1.0 - est.P_plus);
      break;
    case ParityDecay::mixing_probability:
      est.P -= gamma * bracket * (est.P - 0.5) * dt;
      break;
    case ParityDecay::none:
      break;
  }
}

void recorrelate(EstimatorState& est, double gamma, double /*n_T*/, double tau) {
  const double rate = gamma * damping_bracket(est);
  est.P = 0.5 + (est.P - 0.5) * std::exp(-rate * tau);
  est.beta = 0.0;
  est.P_plus = est.P;
}

bool robustness_pass(EstimatorState& est, const FilterSettings& settings) {
  const double ceiling = settings.variance_ceiling;
  const double v_reset = std::min((2.0 * settings.n_T + 1.0) / 2.0, ceiling);
  bool reset = false;
  if (!std::isfinite(est.x) || !std::isfinite(est.p)) {
    est.x = std::isfinite(est.x) ? est.x : 0.0;
    est.p = std::isfinite(est.p) ? est.p : 0.0;
    reset = true;
  }
  const bool bad = !std::isfinite(est.Vx) || !std::isfinite(est.Vp) || !std::isfinite(est.C) || est.Vx < 0.0 ||
                   est.Vp < 0.0 || est.Vx * est.Vp < 0.9 * (est.C * est.C + 0.25) || est.Vx > ceiling ||
                   est.Vp > ceiling;
  if (bad || reset) {
    est.Vx = v_reset;
    est.Vp = v_reset;
    est.C = 0.0;
    reset = true;
  }
  est.P = std::isfinite(est.P) ? clamp_prob(est.P) : 0.5;
  est.P_plus = std::isfinite(est.P_plus) ? clamp_prob(est.P_plus) : 0.5;
  est.beta = std::isfinite(est.beta) ? std::clamp(est.beta, 0.0, 0.5) : 0.5;
  return reset;
}

}  // namespace catlock
