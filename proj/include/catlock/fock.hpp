#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace catlock {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using QubitMatrix = Eigen::Matrix2cd;
using QubitVector = Eigen::Vector2cd;

/// Square operator stored as a set of diagonals.
///
/// Band `b` holds the entries A(i, i + offset_b). Every oscillator operator in
/// this library is banded (the ladder operators occupy one off-diagonal, x^2
/// occupies offsets -2, 0, +2), so application is O(dim * bands).
class BandedOperator {
 public:
  BandedOperator() = default;
  explicit BandedOperator(int dim);

  int dim() const { return dim_; }
  const std::vector<int>& offsets() const { return offsets_; }

  void set(int row, int col, cplx value);
  cplx at(int row, int col) const;

  /// out = A * in, both of length dim(). `in` and `out` must not alias.
  void apply(const cplx* in, cplx* out) const;
  CVector operator*(const CVector& v) const;

  Eigen::MatrixXcd dense() const;

 private:
  int band_index(int offset) const;

  int dim_ = 0;
  std::vector<int> offsets_;
  std::vector<std::vector<cplx>> bands_;
};

/// Oscillator operator tensored with a qubit operator: osc ⊗ qubit.
struct ProductOperator {
  BandedOperator osc;
  QubitMatrix qubit = QubitMatrix::Identity();
};

/// Pure state on the truncated oscillator ⊗ qubit space.
///
/// Amplitudes are stored qubit-major: index q * dim_osc + n holds <n, q|psi>,
/// so an oscillator operator acts on two contiguous blocks.
class TruncatedState {
 public:
  TruncatedState() = default;
  explicit TruncatedState(int dim_osc);

  static TruncatedState product(const CVector& oscillator, const QubitVector& qubit);

  int dim_osc() const { return dim_osc_; }
  Eigen::Index size() const { return amplitudes_.size(); }

  CVector& amplitudes() { return amplitudes_; }
  const CVector& amplitudes() const { return amplitudes_; }

  auto block(int q) { return amplitudes_.segment(q * dim_osc_, dim_osc_); }
  auto block(int q) const { return amplitudes_.segment(q * dim_osc_, dim_osc_); }

  cplx amplitude(int n, int q) const { return amplitudes_[q * dim_osc_ + n]; }

  double norm() const { return amplitudes_.norm(); }
  void normalize();

  /// Total population in the top `levels` Fock states.
  double top_population(int levels = 4) const;
  bool truncation_healthy(double threshold = 1e-6) const { return top_population() < threshold; }

  bool all_finite() const { return amplitudes_.allFinite(); }

 private:
  int dim_osc_ = 0;
  CVector amplitudes_;
};

/// Immutable operator catalogue for one Fock truncation. Shareable across threads.
struct OperatorSet {
  int dim_osc = 0;

  BandedOperator a;
  BandedOperator adag;
  BandedOperator number;
  BandedOperator x;       // (a + a†)/√2
  BandedOperator p;       // -i(a - a†)/√2
  BandedOperator x2;      // projection of the untruncated x̃² (diagonal n + 1/2 everywhere)
  BandedOperator parity;  // (-1)^n
  BandedOperator identity;

  Eigen::MatrixXd abs_x;  // <m| |x̃| |n>, by quadrature over Hermite functions

  QubitMatrix sigma_x;
  QubitMatrix sigma_z;
  QubitMatrix qubit_identity;

  ProductOperator number_q;
  ProductOperator x_q;
  ProductOperator p_q;
  ProductOperator x2_q;
  ProductOperator parity_q;
  ProductOperator sigma_x_q;
  ProductOperator sigma_z_q;
  ProductOperator parity_sigma_x;  // Π ⊗ σx
};

OperatorSet build_operators(int dim_osc);

/// <psi|O|psi> for a product operator.
cplx expectation(const TruncatedState& state, const ProductOperator& op);
/// Applies a product operator: returns O|psi>.
CVector apply(const ProductOperator& op, const TruncatedState& state);
/// Applies an oscillator operator to both qubit blocks.
CVector apply_oscillator(const BandedOperator& op, const CVector& amplitudes, int dim_osc);

double abs_position_expectation(const TruncatedState& state, const OperatorSet& ops);

/// Tr(rho_osc^2) of the oscillator reduced state.
double oscillator_purity(const TruncatedState& state);

enum class CatParity { even, odd };

CVector coherent_state(cplx alpha, int dim_osc);

/// (|α> ± |-α>)/√(2(1 ± e^{-2|α|²})). The odd cat at α = 0 is its limit |1>.
CVector cat_state(cplx alpha, CatParity parity, int dim_osc);

/// Minimum-uncertainty packet with <x̃> = x, <p̃> = p.
CVector displaced_gaussian_state(double x, double p, int dim_osc);

QubitVector qubit_plus();
QubitVector qubit_minus();

}  // namespace catlock
