#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "catlock/fock.hpp"
#include "catlock/params.hpp"
#include "catlock/rng.hpp"

namespace catlock {

enum class JumpKind { emission, absorption };

struct JumpEvent {
  double t = 0.0;
  JumpKind kind = JumpKind::emission;
};

/// One integrator step worth of measurement output. Channels are inactive
/// (and their increments zero) during correlation windows.
struct RecordSample {
  double t = 0.0;   // time at the end of the step
  double dt = 0.0;
  double dr = 0.0;    // x̃² channel
  double dr_x = 0.0;  // σx channel
  bool x2_active = false;
  bool qubit_active = false;
  bool correlating = false;
};

struct MeasurementRecord {
  std::vector<RecordSample> samples;
  std::vector<JumpEvent> jumps;
  std::vector<double> recorrelations;
};

struct TrueObservables {
  double t = 0.0;
  double abs_x = 0.0;  // <|x̃|>
  double x2 = 0.0;
  double p2 = 0.0;
  double number = 0.0;
  double parity = 0.0;  // <Π ⊗ 1>
  double purity = 1.0;  // oscillator reduced state
};

TrueObservables observe_truth(const TruncatedState& state, const OperatorSet& ops, double t);

/// Itô step of the unit-efficiency diffusive unraveling for measuring `op`
/// with the given strength, followed by renormalization. Returns the record
/// increment dr = 4 s <O> dt + √(2s) dW.
double step_diffusive(TruncatedState& state, const ProductOperator& op, double strength, double dt, double dW);

struct JumpProbabilities {
  double emission = 0.0;
  double absorption = 0.0;
};

JumpProbabilities jump_probabilities(const TruncatedState& state, double gamma, double n_T, double dt);

/// Quantum-jump unraveling of thermal damping. Returns the jumps applied
/// (usually none). When emission and absorption both fire in one step, the
/// step is redone as two half steps.
std::vector<JumpKind> step_thermal(TruncatedState& state, const OperatorSet& ops, double gamma, double n_T, double dt,
                                   CounterRng& rng);

/// exp(-i n̂ dt) followed by exp(-i λ x̃² dt), λ = (multiplier - 1)/2, i.e.
/// H = n̂ + λ x̃² = p̃²/2 + multiplier·x̃²/2 up to a constant.
void step_hamiltonian(TruncatedState& state, const OperatorSet& ops, double multiplier, double dt);

/// exp(-i g t n̂ |↑><↑|): only the σz = +1 branch picks up the phase g t n, so
/// after t = π/g that branch carries Π and the packet itself is not rotated.
void apply_parity_coupling(TruncatedState& state, double g, double duration);

/// Projective σx readout of the qubit (outcome drawn with `u`), then reset to |+>.
void reset_qubit(TruncatedState& state, double u);

/// Full correlation window: qubit reset, then the dispersive coupling for
/// τ = π/g interleaved with harmonic evolution and damping. No measurement.
void correlation_step(TruncatedState& state, const OperatorSet& ops, const PhysicalParams& params, CounterRng& rng,
                      double multiplier = 1.0, std::vector<JumpEvent>* jumps = nullptr, double t0 = 0.0);

struct EngineSwitches {
  bool x2_channel = true;
  bool qubit_channel = true;
  bool damping = true;
};

struct SegmentResult {
  MeasurementRecord record;
  std::vector<TrueObservables> samples;
};

/// Owns the true conditioned state of one trajectory and advances it one
/// operator-split step at a time: hamiltonian → thermal → x̃² → σx.
class TrajectoryEngine {
 public:
  TrajectoryEngine(std::shared_ptr<const OperatorSet> ops, PhysicalParams params, TruncatedState initial,
                   std::uint64_t seed, EngineSwitches switches = {});

  /// One measurement step of length params.dt under the given potential multiplier.
  RecordSample step(double multiplier);

  /// Starts a correlation window (qubit readout and reset).
  void begin_correlation();
  /// One sub-step of the correlation window. Channels are masked.
  RecordSample correlation_substep(double multiplier, double dt_sub);

  /// Open-loop run of measurement steps at a fixed multiplier, sampling the
  /// truth every `decimation` steps (and at the end).
  SegmentResult run_segment(double duration, double multiplier = 1.0, int decimation = 50);

  const TruncatedState& state() const { return state_; }
  TruncatedState& mutable_state() { return state_; }
  const OperatorSet& operators() const { return *ops_; }
  const PhysicalParams& params() const { return params_; }
  const std::vector<JumpEvent>& jumps() const { return jumps_; }
  const std::vector<double>& recorrelations() const { return recorrelations_; }
  double time() const { return t_; }
  TrueObservables observe() const { return observe_truth(state_, *ops_, t_); }

 private:
  void check_health();

  std::shared_ptr<const OperatorSet> ops_;
  PhysicalParams params_;
  EngineSwitches switches_;
  TruncatedState state_;
  CounterRng rng_;
  double t_ = 0.0;
  std::vector<JumpEvent> jumps_;
  std::vector<double> recorrelations_;
};

}  // namespace catlock
