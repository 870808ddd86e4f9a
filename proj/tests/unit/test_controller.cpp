#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "catlock/controller.hpp"
#include "catlock/errors.hpp"
#include "catlock/params.hpp"
#include "catlock/rng.hpp"

using namespace catlock;

namespace {

constexpr double kPi = std::numbers::pi;
const double kDt = 2e-4 * kTwoPi;

std::optional<ExtremumEvent> feed(FeedbackController& c, double t, double y, double n_e = 18.0) {
  c.ingest(t, y, n_e);
  return c.detect_extremum();
}

}  // namespace

TEST(ControllerModes, ThresholdsAndHysteresis) {
  FeedbackController c;
  c.ingest(0.0, 1.0, 30.0);
  EXPECT_EQ(c.mode(), ControllerMode::cooling);
  c.ingest(0.1, 1.0, 22.0);  // above the dormant band: keep cooling
  EXPECT_EQ(c.mode(), ControllerMode::cooling);
  c.ingest(0.2, 1.0, 18.0);
  EXPECT_EQ(c.mode(), ControllerMode::dormant);
  c.ingest(0.3, 1.0, 18.0);
  EXPECT_EQ(c.mode(), ControllerMode::dormant);
  c.ingest(0.4, 1.0, 22.0);  // dormant does not re-trigger below 25
  EXPECT_EQ(c.mode(), ControllerMode::dormant);
  c.ingest(0.5, 1.0, 10.0);
  EXPECT_EQ(c.mode(), ControllerMode::heating);
  c.ingest(0.6, 1.0, 19.0);
  EXPECT_EQ(c.mode(), ControllerMode::dormant);
}

TEST(ControllerModes, CommandTable) {
  const ExtremumEvent minimum{Extremum::minimum, 0.0, 0.0};
  const ExtremumEvent maximum{Extremum::maximum, 0.0, 0.0};
  FeedbackController c;
  c.force_mode(ControllerMode::cooling);
  EXPECT_DOUBLE_EQ(c.command(minimum), 1.2);
  EXPECT_DOUBLE_EQ(c.command(maximum), 0.8);
  EXPECT_DOUBLE_EQ(c.command(std::nullopt), 0.8);  // held
  c.force_mode(ControllerMode::heating);
  EXPECT_DOUBLE_EQ(c.multiplier(), 1.0);
  EXPECT_DOUBLE_EQ(c.command(minimum), 0.8);
  EXPECT_DOUBLE_EQ(c.command(maximum), 1.2);
  c.force_mode(ControllerMode::dormant);
  EXPECT_DOUBLE_EQ(c.command(minimum), 1.0);
  EXPECT_DOUBLE_EQ(c.command(maximum), 1.0);
}

TEST(ControllerModes, RejectsBadConfigAndTime) {
  ControllerConfig bad;
  bad.epsilon = 1.5;
  EXPECT_THROW(FeedbackController{bad}, ConfigError);
  FeedbackController c;
  c.ingest(1.0, 0.0, 18.0);
  EXPECT_THROW(c.ingest(0.5, 0.0, 18.0), UsageError);
  EXPECT_THROW(mode_from_string("warming"), ConfigError);
  EXPECT_EQ(mode_from_string(to_string(ControllerMode::heating)), ControllerMode::heating);
}

TEST(ExtremumDetection, CosSquaredMinimumAndMaximum) {
  FeedbackController c;
  std::vector<ExtremumEvent> events;
  for (double t = 0.0; t < 2.0 * kPi; t += kDt) {
    if (auto e = feed(c, t, std::cos(t) * std::cos(t))) events.push_back(*e);
  }
  // extrema of cos² at multiples of π/2 after the first look-back: π/2 (min), π (max), 3π/2 (min)
  ASSERT_GE(events.size(), 3u);
  EXPECT_EQ(events[0].kind, Extremum::minimum);
  EXPECT_NEAR(events[0].t_vertex, kPi / 2.0, 0.01);
  EXPECT_EQ(events[1].kind, Extremum::maximum);
  EXPECT_NEAR(events[1].t_vertex, kPi, 0.01);
  EXPECT_EQ(events[2].kind, Extremum::minimum);
  EXPECT_NEAR(events[2].t_vertex, 1.5 * kPi, 0.01);
  for (const ExtremumEvent& e : events) EXPECT_GE(e.t_detect, e.t_vertex);
}

TEST(ExtremumDetection, MonotoneRampGivesNothing) {
  FeedbackController c;
  for (double t = 0.0; t < 3.0; t += kDt) EXPECT_FALSE(feed(c, t, 2.0 * t + 1.0).has_value());
}

TEST(ExtremumDetection, FlatSeriesGivesNothing) {
  FeedbackController c;
  for (double t = 0.0; t < 3.0; t += kDt) EXPECT_FALSE(feed(c, t, 4.0).has_value());
}

// Synthetic-signal calibration: cos²(t) + N(0, 0.01) around the minimum at π/2.
TEST(ExtremumDetection, NoisyTimingWithinOneFortiethPeriod) {
  const double tolerance = kTwoPi / 40.0;
  CounterRng rng(2024);
  const int trials = 200;
  int vertex_ok = 0, detect_ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    FeedbackController c;
    std::optional<ExtremumEvent> hit;
    for (double t = 0.9; t < 2.6 && !hit; t += kDt) {
      hit = feed(c, t, std::cos(t) * std::cos(t) + 0.1 * rng.normal());
      if (hit && hit->kind != Extremum::minimum) hit.reset();
    }
    if (hit && std::abs(hit->t_vertex - kPi / 2.0) < tolerance) ++vertex_ok;
    if (hit && std::abs(hit->t_detect - kPi / 2.0) < tolerance) ++detect_ok;
  }
  EXPECT_GE(vertex_ok, static_cast<int>(0.9 * trials));
  EXPECT_GE(detect_ok, static_cast<int>(0.9 * trials));
}

namespace {

// Classical oscillator x'' = -m x under the controller, RK4. Returns the
// action x² + p² at the end of each period.
std::vector<double> classical_loop(ControllerMode mode, double n_e, int periods) {
  FeedbackController c;
  c.force_mode(mode);
  double x = 6.0, p = 0.0, mult = 1.0, t = 0.0;
  const double h = kDt;
  const int per_period = static_cast<int>(std::lround(kTwoPi / h));
  std::vector<double> action{x * x + p * p};
  for (int period = 0; period < periods; ++period) {
    for (int i = 0; i < per_period; ++i) {
      auto f = [&](double xx, double pp) { return std::pair{pp, -mult * xx}; };
      const auto [k1x, k1p] = f(x, p);
      const auto [k2x, k2p] = f(x + 0.5 * h * k1x, p + 0.5 * h * k1p);
      const auto [k3x, k3p] = f(x + 0.5 * h * k2x, p + 0.5 * h * k2p);
      const auto [k4x, k4p] = f(x + h * k3x, p + h * k3p);
      x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
      t += h;
      mult = c.update(t, x * x, n_e);
    }
    action.push_back(x * x + p * p);
  }
  return action;
}

}  // namespace

TEST(ClassicalLoop, CoolingShrinksActionEveryPeriod) {
  const std::vector<double> a = classical_loop(ControllerMode::cooling, 30.0, 5);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i], a[i - 1]) << i;
  EXPECT_LT(a.back(), 0.5 * a.front());
}

TEST(ClassicalLoop, HeatingGrowsActionEveryPeriod) {
  const std::vector<double> a = classical_loop(ControllerMode::heating, 10.0, 5);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GT(a[i], a[i - 1]) << i;
}
