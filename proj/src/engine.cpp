#include "catlock/engine.hpp"

#include <cmath>
#include <sstream>

#include "catlock/errors.hpp"

namespace catlock {

TrueObservables observe_truth(const TruncatedState& state, const OperatorSet& ops, double t) {
  TrueObservables o;
  o.t = t;
  o.abs_x = abs_position_expectation(state, ops);
  o.x2 = expectation(state, ops.x2_q).real();
  o.p2 = apply(ops.p_q, state).squaredNorm();
  o.number = expectation(state, ops.number_q).real();
  o.parity = expectation(state, ops.parity_q).real();
  o.purity = oscillator_purity(state);
  return o;
}

double step_diffusive(TruncatedState& state, const ProductOperator& op, double strength, double dt, double dW) {
  if (strength < 0.0) throw UsageError("step_diffusive: negative measurement strength");
  if (strength == 0.0) return 0.0;
  CVector& psi = state.amplitudes();
  const CVector v = apply(op, state);
  const double mean = psi.dot(v).real();
  TruncatedState tmp(state.dim_osc());
  tmp.amplitudes() = v;
  const CVector w = apply(op, tmp);
  const double noise = std::sqrt(2.0 * strength);
  psi += -strength * dt * (w - 2.0 * mean * v + mean * mean * psi) + noise * dW * (v - mean * psi);
  if (!state.all_finite()) throw NumericalError("non-finite amplitudes after diffusive measurement step");
  state.normalize();
  return 4.0 * strength * mean * dt + noise * dW;
}

namespace {

double mean_number(const TruncatedState& state) {
  const int N = state.dim_osc();
  double n = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int i = 1; i < N; ++i) n += i * std::norm(state.amplitude(i, q));
  return n;
}

// <a a†> for the truncated operator: a†|N-1> = 0.
double mean_anti_number(const TruncatedState& state) {
  const int N = state.dim_osc();
  double n = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int i = 0; i + 1 < N; ++i) n += (i + 1) * std::norm(state.amplitude(i, q));
  return n;
}

void no_jump_evolution(TruncatedState& state, double gamma, double n_T, double dt) {
  const int N = state.dim_osc();
  for (int n = 0; n < N; ++n) {
    const double f = std::exp(-0.5 * gamma * ((n_T + 1.0) * n + n_T * (n + 1.0)) * dt);
    state.amplitudes()[n] *= f;
    state.amplitudes()[N + n] *= f;
  }
  state.normalize();
}

void thermal_substep(TruncatedState& state, const OperatorSet& ops, double gamma, double n_T, double dt, CounterRng& rng,
                     std::vector<JumpKind>& fired, int depth) {
  const JumpProbabilities p = jump_probabilities(state, gamma, n_T, dt);
  const bool emit = rng.uniform() < p.emission;
  const bool absorb = n_T > 0.0 && rng.uniform() < p.absorption;
  if (emit && absorb && depth < 16) {
    thermal_substep(state, ops, gamma, n_T, 0.5 * dt, rng, fired, depth + 1);
    thermal_substep(state, ops, gamma, n_T, 0.5 * dt, rng, fired, depth + 1);
    return;
  }
  if (emit) {
    state.amplitudes() = apply_oscillator(ops.a, state.amplitudes(), state.dim_osc());
    state.normalize();
    fired.push_back(JumpKind::emission);
  } else if (absorb) {
    state.amplitudes() = apply_oscillator(ops.adag, state.amplitudes(), state.dim_osc());
    state.normalize();
    fired.push_back(JumpKind::absorption);
  } else {
    no_jump_evolution(state, gamma, n_T, dt);
  }
}

}  // namespace

JumpProbabilities jump_probabilities(const TruncatedState& state, double gamma, double n_T, double dt) {
  return {gamma * (n_T + 1.0) * mean_number(state) * dt, gamma * n_T * mean_anti_number(state) * dt};
}

std::vector<JumpKind> step_thermal(TruncatedState& state, const OperatorSet& ops, double gamma, double n_T, double dt,
                                   CounterRng& rng) {
  std::vector<JumpKind> fired;
  if (gamma == 0.0) return fired;
  thermal_substep(state, ops, gamma, n_T, dt, rng, fired, 0);
  return fired;
}

void step_hamiltonian(TruncatedState& state, const OperatorSet& ops, double multiplier, double dt) {
  const int N = state.dim_osc();
  CVector& psi = state.amplitudes();
  for (int n = 0; n < N; ++n) {
    const cplx phase = std::polar(1.0, -static_cast<double>(n) * dt);
    psi[n] *= phase;
    psi[N + n] *= phase;
  }
  const double lambda = 0.5 * (multiplier - 1.0);
  if (lambda == 0.0) return;
  // Taylor series of exp(-i λ dt x̃²); λ dt ‖x̃²‖ is small so this converges in a few terms.
  const cplx factor{0.0, -lambda * dt};
  CVector term = psi;
  CVector next(psi.size());
  for (int order = 1; order < 40; ++order) {
    ops.x2.apply(term.data(), next.data());
    ops.x2.apply(term.data() + N, next.data() + N);
    term = next * (factor / static_cast<double>(order));
    psi += term;
    if (term.norm() < 1e-17) break;
  }
  state.normalize();
}

void apply_parity_coupling(TruncatedState& state, double g, double duration) {
  const int N = state.dim_osc();
  CVector& psi = state.amplitudes();
  for (int n = 0; n < N; ++n) psi[n] *= std::polar(1.0, -g * duration * n);
}

void reset_qubit(TruncatedState& state, double u) {
  const CVector plus = (state.block(0) + state.block(1)) / std::sqrt(2.0);
  const CVector minus = (state.block(0) - state.block(1)) / std::sqrt(2.0);
  const double p_plus = plus.squaredNorm() / (plus.squaredNorm() + minus.squaredNorm());
  CVector osc = (u < p_plus) ? plus : minus;
  const double n = osc.norm();
  if (!(n > 0.0)) throw NumericalError("qubit reset selected a zero-probability branch");
  state = TruncatedState::product(osc / n, qubit_plus());
}

void correlation_step(TruncatedState& state, const OperatorSet& ops, const PhysicalParams& params, CounterRng& rng,
                      double multiplier, std::vector<JumpEvent>* jumps, double t0) {
  reset_qubit(state, rng.uniform());
  const double tau = params.tau_corr();
  const int substeps = std::max(1, static_cast<int>(std::lround(tau / params.dt)));
  const double h = tau / substeps;
  double t = t0;
  for (int i = 0; i < substeps; ++i) {
    t += h;
    step_hamiltonian(state, ops, multiplier, h);
    for (JumpKind kind : step_thermal(state, ops, params.gamma, params.n_T, h, rng)) {
      if (jumps) jumps->push_back({t, kind});
    }
    apply_parity_coupling(state, params.g, h);
  }
}

TrajectoryEngine::TrajectoryEngine(std::shared_ptr<const OperatorSet> ops, PhysicalParams params, TruncatedState initial,
                                   std::uint64_t seed, EngineSwitches switches)
    : ops_(std::move(ops)), params_(params), switches_(switches), state_(std::move(initial)), rng_(seed) {
  if (!ops_ || ops_->dim_osc != state_.dim_osc()) throw UsageError("TrajectoryEngine: operator/state dimension mismatch");
  state_.normalize();
}

void TrajectoryEngine::check_health() {
  if (!state_.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite amplitudes at t=" << t_ << " (seed " << rng_.seed() << ")";
    throw NumericalError(msg.str());
  }
  const double top = state_.top_population();
  if (top >= 1e-6) {
    std::ostringstream msg;
    msg << "truncation overflow at t=" << t_ << ": top-4 Fock population " << top << " (dim_osc " << state_.dim_osc()
        << ", seed " << rng_.seed() << ")";
    throw NumericalError(msg.str());
  }
}

RecordSample TrajectoryEngine::step(double multiplier) {
  const double dt = params_.dt;
  t_ += dt;
  step_hamiltonian(state_, *ops_, multiplier, dt);
  if (switches_.damping) {
    for (JumpKind kind : step_thermal(state_, *ops_, params_.gamma, params_.n_T, dt, rng_)) jumps_.push_back({t_, kind});
  }
  RecordSample s;
  s.t = t_;
  s.dt = dt;
  const double sqrt_dt = std::sqrt(dt);
  if (switches_.x2_channel) {
    s.dr = step_diffusive(state_, ops_->x2_q, params_.k, dt, sqrt_dt * rng_.normal());
    s.x2_active = true;
  }
  if (switches_.qubit_channel) {
    s.dr_x = step_diffusive(state_, ops_->sigma_x_q, params_.mu, dt, sqrt_dt * rng_.normal());
    s.qubit_active = true;
  }
  check_health();
  return s;
}

void TrajectoryEngine::begin_correlation() {
  reset_qubit(state_, rng_.uniform());
  recorrelations_.push_back(t_);
}

RecordSample TrajectoryEngine::correlation_substep(double multiplier, double dt_sub) {
  t_ += dt_sub;
  step_hamiltonian(state_, *ops_, multiplier, dt_sub);
  if (switches_.damping) {
    for (JumpKind kind : step_thermal(state_, *ops_, params_.gamma, params_.n_T, dt_sub, rng_)) jumps_.push_back({t_, kind});
  }
  apply_parity_coupling(state_, params_.g, dt_sub);
  check_health();
  RecordSample s;
  s.t = t_;
  s.dt = dt_sub;
  s.correlating = true;
  return s;
}

SegmentResult TrajectoryEngine::run_segment(double duration, double multiplier, int decimation) {
  const double ratio = duration / params_.dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6 * std::max(1.0, ratio)) {
    throw UsageError("run_segment: duration must be a multiple of dt");
  }
  if (decimation < 1) throw UsageError("run_segment: decimation must be positive");
  SegmentResult out;
  const std::size_t first_jump = jumps_.size();
  out.samples.push_back(observe());
  for (long i = 1; i <= steps; ++i) {
    out.record.samples.push_back(step(multiplier));
    if (i % decimation == 0 || i == steps) out.samples.push_back(observe());
  }
  out.record.jumps.assign(jumps_.begin() + static_cast<long>(first_jump), jumps_.end());
  return out;
}

}  // namespace catlock
