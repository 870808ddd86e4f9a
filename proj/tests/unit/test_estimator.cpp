#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "catlock/estimator.hpp"
#include "catlock/fock.hpp"
#include "catlock/params.hpp"
#include "catlock/rng.hpp"
#include "support/oracles.hpp"

using namespace catlock;

namespace {

const double kK = 1.0 / (200.0 * std::numbers::pi);

using oracle::packet;
using oracle::quadrature;
using oracle::QuadratureMoments;

}  // namespace

TEST(CatMoments, MatchQuadratureOracle) {
  const double cases[][4] = {{0.3, 0.0, 0.5, 0.0}, {1.0, 0.5, 0.5, 0.0}, {0.8, -0.3, 0.7, 0.2},
                             {2.0, 0.1, 0.4, -0.1}, {0.05, 0.02, 0.5, 0.0}};
  for (const auto& c : cases) {
    const CatMoments m = cat_moments(c[0], c[1], c[2], (c[3] * c[3] + 0.25) / c[2], c[3]);
    const QuadratureMoments q = quadrature(c[0], c[1], c[2], c[3]);
    EXPECT_NEAR(m.chi, q.chi, 1e-8) << c[0];
    EXPECT_NEAR(m.x2_even, q.x2_even, 1e-7) << c[0];
    EXPECT_NEAR(m.x2_odd, q.x2_odd, 1e-6 * std::max(1.0, q.x2_odd)) << c[0];
  }
}

// Independent Wigner-function form of the overlap for a pure Gaussian:
// χ = exp(-½ mᵀ Σ⁻¹ m) / (2√det Σ), m = (x̄, p̄).
TEST(CatMoments, OverlapMatchesWignerForm) {
  for (double C : {-0.3, 0.0, 0.25}) {
    const double x = 1.1, p = -0.4, Vx = 0.6;
    const double Vp = (C * C + 0.25) / Vx;
    const double det = Vx * Vp - C * C;
    const double quad = (Vp * x * x - 2.0 * C * x * p + Vx * p * p) / det;
    const double oracle = std::exp(-0.5 * quad) / (2.0 * std::sqrt(det));
    EXPECT_NEAR(cat_moments(x, p, Vx, Vp, C).chi, oracle, 1e-14);
  }
}

TEST(CatMoments, DegenerateAndSeparatedLimits) {
  const CatMoments zero = cat_moments(0.0, 0.0, 0.5, 0.5, 0.0);
  EXPECT_NEAR(zero.chi, 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(zero.x2_odd));
  const CatMoments tiny = cat_moments(1e-5, 0.0, 0.5, 0.5, 0.0);
  EXPECT_NEAR(tiny.x2_even, 0.5, 1e-8);
  EXPECT_NEAR(tiny.x2_odd, 1.5, 1e-6);  // odd cat → |1>, <x̃²> = 3/2
  const EstimatorState far = packet(6.0, 0.0, 0.5, 0.0, 0.9);
  EXPECT_DOUBLE_EQ(estimated_x2(far), far.Vx + far.x * far.x);
}

TEST(ParityGain, FrozenWhenWellSeparated) {
  EXPECT_LT(std::abs(parity_gain(packet(6.0, 0.0, 0.5, 0.0, 0.5), kK)), 1e-8);
  for (double Vx : {0.3, 0.5, 1.0, 3.0}) {
    for (double p : {0.0, 0.5}) {
      const double x = std::sqrt(40.0 * Vx) * 1.0001;
      EXPECT_LT(std::abs(parity_gain(packet(x, p, Vx, 0.0, 0.5), kK)), 1e-8) << Vx;
    }
  }
}

TEST(ParityGain, OverlappingPacketsMatchQuadrature) {
  const EstimatorState s = packet(0.3, 0.0, 0.5, 0.0, 0.5);
  const double oracle = oracle::parity_gain_oracle(0.3, 0.0, 0.5, 0.0, kK);
  const double gain = parity_gain(s, kK);
  EXPECT_GT(std::abs(gain), 1e-3);
  EXPECT_NEAR(gain, oracle, 1e-6);
}

TEST(Bracket, EqualsTwiceEstimatedNumber) {
  CounterRng rng(2);
  for (int i = 0; i < 100; ++i) {
    EstimatorState s = packet(6.0 * rng.normal(), 3.0 * rng.normal(), 0.3 + rng.uniform(), 0.2 * rng.normal(), 0.5);
    EXPECT_NEAR(damping_bracket(s), 2.0 * estimated_number(s), 1e-12);
  }
}

// <n> of the Gaussian estimate equals <a†a> of the corresponding Fock state.
TEST(Bracket, NumberMatchesFockExpectation) {
  const OperatorSet ops = build_operators(64);
  const TruncatedState s = TruncatedState::product(displaced_gaussian_state(3.0, -2.0, 64), qubit_plus());
  EXPECT_NEAR(estimated_number(packet(3.0, -2.0, 0.5, 0.0, 0.5)), expectation(s, ops.number_q).real(), 1e-9);
}

TEST(Innovation, TruncatedAtFourSigma) {
  const double dt = 1e-4;
  EXPECT_DOUBLE_EQ(truncate_innovation(1.0, dt), 4.0 * std::sqrt(dt));
  EXPECT_DOUBLE_EQ(truncate_innovation(-1.0, dt), -4.0 * std::sqrt(dt));
  EXPECT_DOUBLE_EQ(truncate_innovation(0.01, dt), 0.01);
}

TEST(QubitChannel, AbsorbingBoundaryAndDirectSubstitution) {
  const double mu = 1.0, dt = 1e-4;
  EstimatorState s;
  s.P_plus = 1.0;
  update_qubit_channel(s, 0.3 * std::sqrt(dt), mu, dt);
  EXPECT_DOUBLE_EQ(s.P_plus, 1.0);

  EstimatorState h;
  h.P_plus = 0.5;
  const double dr = std::sqrt(2.0 * mu) * std::sqrt(dt);  // dU = √dt at <σx>_e = 0
  update_qubit_channel(h, dr, mu, dt);
  EXPECT_NEAR(h.P_plus - 0.5, std::sqrt(2.0 * mu) * 0.25 * std::sqrt(dt), 1e-15);
  EXPECT_DOUBLE_EQ(h.P, h.P_plus);
}

TEST(QubitChannel, ConvergesOnFrozenPlus) {
  const double mu = 1.0, dt = 1e-3;
  CounterRng rng(8);
  int converged = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    EstimatorState s;
    for (int i = 0; i < static_cast<int>(5.0 / mu / dt); ++i) {
      const double dr = 4.0 * mu * dt + std::sqrt(2.0 * mu * dt) * rng.normal();
      update_qubit_channel(s, dr, mu, dt);
    }
    if (s.P_plus > 0.9) ++converged;
  }
  EXPECT_GE(converged, 45);
}

// Scalar-ODE oracle for the correlation-window decay.
TEST(Recorrelate, ExponentialDecayOfMixingProbability) {
  EstimatorState s = packet(6.0, 0.0, 0.5, 0.0, 0.9);
  s.beta = 0.2;
  const double gamma = 1.0 / 200.0, tau = std::numbers::pi / 12.5;
  double P = 0.9;
  const int n = 1000;
  const double h = tau / n;
  auto f = [&](double q) { return -gamma * 36.0 * (q - 0.5); };
  for (int i = 0; i < n; ++i) {
    const double k1 = f(P), k2 = f(P + 0.5 * h * k1), k3 = f(P + 0.5 * h * k2), k4 = f(P + h * k3);
    P += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  recorrelate(s, gamma, 0.0, tau);
  EXPECT_NEAR(s.P, P, 1e-9);
  EXPECT_NEAR(s.P - 0.5, 0.4 * std::exp(-gamma * 36.0 * tau), 1e-15);
  EXPECT_EQ(s.beta, 0.0);
  EXPECT_EQ(s.P_plus, s.P);

  EstimatorState z = packet(6.0, 0.0, 0.5, 0.0, 0.7);
  recorrelate(z, 0.0, 0.0, tau);
  EXPECT_EQ(z.P, 0.7);
}

TEST(Damping, RelaxesTowardThermalState) {
  EstimatorState s = packet(4.0, 1.0, 0.5, 0.1, 0.8);
  for (int i = 0; i < 200000; ++i) update_damping(s, 0.5, 2.0, 1e-3, ParityDecay::qubit_correlation);
  EXPECT_NEAR(s.x, 0.0, 1e-9);
  EXPECT_NEAR(s.Vx, 2.5, 1e-9);
  EXPECT_NEAR(s.Vp, 2.5, 1e-9);
  EXPECT_NEAR(s.C, 0.0, 1e-9);
  EXPECT_NEAR(s.beta, 0.5, 1e-9);
  EXPECT_NEAR(s.P, 0.5, 1e-9);
}

TEST(Robustness, ResetsUnphysicalVariances) {
  FilterSettings cold;
  EstimatorState s = packet(1.0, 0.0, 0.5, 0.0, 0.5);
  s.Vx = -0.1;
  EXPECT_TRUE(robustness_pass(s, cold));
  EXPECT_EQ(s.Vx, 0.5);
  EXPECT_EQ(s.C, 0.0);

  FilterSettings hot;
  hot.n_T = 12.0;
  EstimatorState t = packet(1.0, 0.0, 0.5, 0.0, 0.5);
  t.Vp = 7.0;
  EXPECT_TRUE(robustness_pass(t, hot));
  EXPECT_EQ(t.Vp, 6.0);  // capped at the ceiling, not V_Th = 12.5

  EstimatorState u = packet(1.0, 0.0, 0.5, 0.0, 0.5);
  u.C = 0.4;  // Vx Vp < 0.9 (C² + 1/4)
  u.Vp = 0.5;
  EXPECT_TRUE(robustness_pass(u, cold));

  EstimatorState ok = packet(1.0, 0.0, 0.5, 0.0, 1.0);
  EXPECT_FALSE(robustness_pass(ok, cold));
  EXPECT_EQ(ok.P, 1.0 - 1e-6);
}

TEST(Filter, HarmonicRotationWithoutMeasurement) {
  EstimatorState s = packet(6.0, 0.0, 0.5, 0.0, 0.5);
  FilterSettings settings;
  const double dt = 1e-4;
  const int steps = static_cast<int>(std::lround(kTwoPi / dt));
  for (int i = 0; i < steps; ++i) update_filter(s, 0.0, 0.0, dt, 1.0, settings);
  EXPECT_NEAR(s.x, 6.0, 0.02);
  EXPECT_NEAR(s.p, 0.0, 0.02);
  EXPECT_NEAR(s.Vx, 0.5, 0.01);
}

TEST(Filter, MeasurementNarrowsPositionVariance) {
  // deterministic part of dVx: -ξ² x̄² Vx² dt
  EstimatorState s = packet(3.0, 0.0, 1.0, 0.0, 0.5);
  s.Vp = 1.0;
  FilterSettings settings;
  const double k = 0.01, dt = 1e-4;
  const double xi = 2.0 * std::sqrt(8.0 * k);
  update_filter(s, 0.0, k, dt, 1.0, settings);
  EXPECT_NEAR(s.Vx, 1.0 - xi * xi * 9.0 * dt, 1e-15);
}
