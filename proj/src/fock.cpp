#include "catlock/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "catlock/errors.hpp"

namespace catlock {

BandedOperator::BandedOperator(int dim) : dim_(dim) {}

int BandedOperator::band_index(int offset) const {
  auto it = std::find(offsets_.begin(), offsets_.end(), offset);
  return it == offsets_.end() ? -1 : static_cast<int>(it - offsets_.begin());
}

void BandedOperator::set(int row, int col, cplx value) {
  if (row < 0 || col < 0 || row >= dim_ || col >= dim_) {
    throw UsageError("BandedOperator::set index out of range");
  }
  const int offset = col - row;
  int b = band_index(offset);
  if (b < 0) {
    offsets_.push_back(offset);
    bands_.emplace_back(dim_, cplx{0.0, 0.0});
    b = static_cast<int>(offsets_.size()) - 1;
  }
  bands_[b][row] = value;
}

cplx BandedOperator::at(int row, int col) const {
  const int b = band_index(col - row);
  return b < 0 ? cplx{0.0, 0.0} : bands_[b][row];
}

void BandedOperator::apply(const cplx* in, cplx* out) const {
  std::fill(out, out + dim_, cplx{0.0, 0.0});
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int off = offsets_[b];
    const cplx* band = bands_[b].data();
    const int lo = std::max(0, -off);
    const int hi = std::min(dim_, dim_ - off);
    for (int i = lo; i < hi; ++i) out[i] += band[i] * in[i + off];
  }
}

CVector BandedOperator::operator*(const CVector& v) const {
  if (v.size() != dim_) throw UsageError("BandedOperator: dimension mismatch");
  CVector out(dim_);
  apply(v.data(), out.data());
  return out;
}

Eigen::MatrixXcd BandedOperator::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::size_t b = 0; b < offsets_.size(); ++b) {
    const int off = offsets_[b];
    for (int i = std::max(0, -off); i < std::min(dim_, dim_ - off); ++i) m(i, i + off) = bands_[b][i];
  }
  return m;
}

TruncatedState::TruncatedState(int dim_osc) : dim_osc_(dim_osc), amplitudes_(CVector::Zero(2 * dim_osc)) {}

TruncatedState TruncatedState::product(const CVector& oscillator, const QubitVector& qubit) {
  TruncatedState s(static_cast<int>(oscillator.size()));
  s.block(0) = qubit[0] * oscillator;
  s.block(1) = qubit[1] * oscillator;
  return s;
}

void TruncatedState::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero or non-finite state");
  amplitudes_ /= n;
}

double TruncatedState::top_population(int levels) const {
  double pop = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int n = std::max(0, dim_osc_ - levels); n < dim_osc_; ++n) pop += std::norm(amplitude(n, q));
  }
  return pop;
}

namespace {

// <m| |x| |n> via Simpson quadrature of 2 ∫_0^L x φ_m φ_n, zero unless m + n is even.
Eigen::MatrixXd abs_position_matrix(int dim) {
  const double h = 0.005;
  const double L = std::sqrt(2.0 * dim + 1.0) + 8.0;
  int npts = static_cast<int>(std::ceil(L / h));
  if (npts % 2 == 1) ++npts;
  const int count = npts + 1;

  Eigen::MatrixXd phi(count, dim);
  Eigen::VectorXd weight(count);
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (int j = 0; j < count; ++j) {
    const double x = j * h;
    const double simpson = (j == 0 || j == npts) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    weight[j] = 2.0 * x * simpson * h / 3.0;
    phi(j, 0) = norm0 * std::exp(-0.5 * x * x);
    if (dim > 1) phi(j, 1) = std::sqrt(2.0) * x * phi(j, 0);
    for (int n = 1; n + 1 < dim; ++n) {
      phi(j, n + 1) = std::sqrt(2.0 / (n + 1)) * x * phi(j, n) - std::sqrt(static_cast<double>(n) / (n + 1)) * phi(j, n - 1);
    }
  }
  Eigen::MatrixXd m = phi.transpose() * weight.asDiagonal() * phi;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if ((r + c) % 2 == 1) m(r, c) = 0.0;
  return m;
}

ProductOperator product(const BandedOperator& osc, const QubitMatrix& q) { return ProductOperator{osc, q}; }

}  // namespace

OperatorSet build_operators(int dim_osc) {
  if (dim_osc < 8) throw ConfigError("dim_osc must be at least 8 (got " + std::to_string(dim_osc) + ")");
  const int N = dim_osc;
  OperatorSet ops;
  ops.dim_osc = N;
  ops.a = BandedOperator(N);
  ops.adag = BandedOperator(N);
  ops.number = BandedOperator(N);
  ops.x = BandedOperator(N);
  ops.p = BandedOperator(N);
  ops.x2 = BandedOperator(N);
  ops.parity = BandedOperator(N);
  ops.identity = BandedOperator(N);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const cplx I{0.0, 1.0};
  for (int n = 0; n < N; ++n) {
    ops.number.set(n, n, static_cast<double>(n));
    ops.parity.set(n, n, (n % 2 == 0) ? 1.0 : -1.0);
    ops.identity.set(n, n, 1.0);
    ops.x2.set(n, n, n + 0.5);
    if (n + 1 < N) {
      const double s = std::sqrt(static_cast<double>(n + 1));
      ops.a.set(n, n + 1, s);
      ops.adag.set(n + 1, n, s);
      ops.x.set(n, n + 1, s * inv_sqrt2);
      ops.x.set(n + 1, n, s * inv_sqrt2);
      ops.p.set(n, n + 1, -I * s * inv_sqrt2);
      ops.p.set(n + 1, n, I * s * inv_sqrt2);
    }
    if (n + 2 < N) {
      const double s = 0.5 * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
      ops.x2.set(n, n + 2, s);
      ops.x2.set(n + 2, n, s);
    }
  }

  ops.abs_x = abs_position_matrix(N);

  ops.sigma_x << 0.0, 1.0, 1.0, 0.0;
  ops.sigma_z << 1.0, 0.0, 0.0, -1.0;
  ops.qubit_identity = QubitMatrix::Identity();

  ops.number_q = product(ops.number, ops.qubit_identity);
  ops.x_q = product(ops.x, ops.qubit_identity);
  ops.p_q = product(ops.p, ops.qubit_identity);
  ops.x2_q = product(ops.x2, ops.qubit_identity);
  ops.parity_q = product(ops.parity, ops.qubit_identity);
  ops.sigma_x_q = product(ops.identity, ops.sigma_x);
  ops.sigma_z_q = product(ops.identity, ops.sigma_z);
  ops.parity_sigma_x = product(ops.parity, ops.sigma_x);
  return ops;
}

CVector apply_oscillator(const BandedOperator& op, const CVector& amplitudes, int dim_osc) {
  if (op.dim() != dim_osc || amplitudes.size() != 2 * dim_osc) throw UsageError("apply_oscillator: dimension mismatch");
  CVector out(amplitudes.size());
  op.apply(amplitudes.data(), out.data());
  op.apply(amplitudes.data() + dim_osc, out.data() + dim_osc);
  return out;
}

CVector apply(const ProductOperator& op, const TruncatedState& state) {
  const int N = state.dim_osc();
  if (op.osc.dim() != N) throw UsageError("operator dimension " + std::to_string(op.osc.dim()) + " does not match state dimension " + std::to_string(N));
  const CVector tmp = apply_oscillator(op.osc, state.amplitudes(), N);
  if (op.qubit.isIdentity(0.0)) return tmp;
  CVector out(tmp.size());
  for (int q = 0; q < 2; ++q) {
    out.segment(q * N, N) = op.qubit(q, 0) * tmp.segment(0, N) + op.qubit(q, 1) * tmp.segment(N, N);
  }
  return out;
}

cplx expectation(const TruncatedState& state, const ProductOperator& op) {
  return state.amplitudes().dot(apply(op, state));
}

double abs_position_expectation(const TruncatedState& state, const OperatorSet& ops) {
  if (ops.dim_osc != state.dim_osc()) throw UsageError("abs_position_expectation: dimension mismatch");
  double total = 0.0;
  for (int q = 0; q < 2; ++q) {
    const CVector b = state.block(q);
    const Eigen::VectorXd re = b.real();
    const Eigen::VectorXd im = b.imag();
    total += re.dot(ops.abs_x * re) + im.dot(ops.abs_x * im);
  }
  return total;
}

double oscillator_purity(const TruncatedState& state) {
  double purity = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int r = 0; r < 2; ++r) purity += std::norm(state.block(q).dot(state.block(r)));
  return purity;
}

CVector coherent_state(cplx alpha, int dim_osc) {
  CVector c(dim_osc);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim_osc; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

CVector cat_state(cplx alpha, CatParity parity, int dim_osc) {
  const double a2 = std::norm(alpha);
  if (!(a2 < dim_osc / 3.0)) {
    throw ConfigError("cat amplitude |alpha|^2 = " + std::to_string(a2) + " too large for truncation " + std::to_string(dim_osc));
  }
  CVector c = CVector::Zero(dim_osc);
  const bool even = parity == CatParity::even;
  if (!even && a2 == 0.0) {
    c[1] = 1.0;
    return c;
  }
  // 1 ± χ with χ = e^{-2|α|²}; expm1 keeps the odd branch accurate as α → 0.
  const double one_pm_chi = even ? 1.0 + std::exp(-2.0 * a2) : -std::expm1(-2.0 * a2);
  const double scale = 2.0 * std::exp(-0.5 * a2) / std::sqrt(2.0 * one_pm_chi);
  // α^n/√n! built incrementally; odd cats start from α so the ratio stays finite for small α.
  cplx term{1.0, 0.0};
  for (int n = 0; n < dim_osc; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    if ((n % 2 == 0) == even) c[n] = scale * term;
  }
  c.normalize();  // absorb the truncated tail
  return c;
}

CVector displaced_gaussian_state(double x, double p, int dim_osc) {
  const cplx alpha = cplx{x, p} / std::sqrt(2.0);
  if (!(std::norm(alpha) < dim_osc / 3.0)) throw ConfigError("displacement too large for truncation");
  CVector c = coherent_state(alpha, dim_osc);
  c.normalize();
  return c;
}

QubitVector qubit_plus() { return QubitVector(1.0, 1.0) / std::sqrt(2.0); }
QubitVector qubit_minus() { return QubitVector(1.0, -1.0) / std::sqrt(2.0); }

}  // namespace catlock
