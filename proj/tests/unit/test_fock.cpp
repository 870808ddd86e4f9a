#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catlock/errors.hpp"
#include "catlock/fock.hpp"

using namespace catlock;

namespace {

constexpr double kTol = 1e-12;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& osc, const QubitMatrix& q) {
  // qubit-major: index q * N + n
  const int N = static_cast<int>(osc.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.block(a * N, b * N, N, N) = q(a, b) * osc;
  return out;
}

CVector random_vector(int size, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  CVector v(size);
  for (int i = 0; i < size; ++i) v[i] = cplx{d(gen), d(gen)};
  return v.normalized();
}

class FockTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { ops_ = new OperatorSet(build_operators(32)); }
  static void TearDownTestSuite() { delete ops_; }
  static OperatorSet* ops_;
};

OperatorSet* FockTest::ops_ = nullptr;

}  // namespace

TEST_F(FockTest, LadderCommutatorIsIdentityBelowTruncation) {
  const int N = ops_->dim_osc;
  const Eigen::MatrixXcd a = ops_->a.dense();
  const Eigen::MatrixXcd ad = ops_->adag.dense();
  const Eigen::MatrixXcd comm = a * ad - ad * a;
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      cplx expected = (r == c) ? 1.0 : 0.0;
      if (r == N - 1 && c == N - 1) expected = -(N - 1.0);
      EXPECT_LT(std::abs(comm(r, c) - expected), kTol) << r << "," << c;
    }
  }
}

TEST_F(FockTest, PositionMomentumCommutator) {
  const int N = ops_->dim_osc;
  const Eigen::MatrixXcd x = ops_->x.dense();
  const Eigen::MatrixXcd p = ops_->p.dense();
  const Eigen::MatrixXcd comm = x * p - p * x;
  for (int n = 0; n + 1 < N; ++n) EXPECT_LT(std::abs(comm(n, n) - cplx{0.0, 1.0}), kTol);
}

TEST_F(FockTest, ObservablesAreHermitian) {
  for (const BandedOperator* op : {&ops_->x, &ops_->p, &ops_->x2, &ops_->number, &ops_->parity}) {
    const Eigen::MatrixXcd m = op->dense();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), kTol);
  }
  EXPECT_LT((ops_->abs_x - ops_->abs_x.transpose()).cwiseAbs().maxCoeff(), kTol);
  EXPECT_LT((ops_->a.dense().adjoint() - ops_->adag.dense()).cwiseAbs().maxCoeff(), kTol);
}

TEST_F(FockTest, XSquaredMatchesProductAwayFromEdge) {
  const int N = ops_->dim_osc;
  const Eigen::MatrixXcd x = ops_->x.dense();
  const Eigen::MatrixXcd xx = x * x;
  const Eigen::MatrixXcd x2 = ops_->x2.dense();
  for (int r = 0; r < N - 1; ++r)
    for (int c = 0; c < N - 1; ++c) EXPECT_LT(std::abs(xx(r, c) - x2(r, c)), kTol);
  EXPECT_NEAR(x2(N - 1, N - 1).real(), N - 0.5, kTol);
}

TEST_F(FockTest, ParityAnticommutesWithLadder) {
  const Eigen::MatrixXcd P = ops_->parity.dense();
  const Eigen::MatrixXcd a = ops_->a.dense();
  EXPECT_LT((P * a + a * P).cwiseAbs().maxCoeff(), kTol);
  EXPECT_LT((P * P - Eigen::MatrixXcd::Identity(P.rows(), P.cols())).cwiseAbs().maxCoeff(), kTol);
  EXPECT_LT((P * ops_->x2.dense() - ops_->x2.dense() * P).cwiseAbs().maxCoeff(), kTol);
}

TEST_F(FockTest, ProductOperatorMatchesKronecker) {
  const int N = ops_->dim_osc;
  TruncatedState s(N);
  s.amplitudes() = random_vector(2 * N, 7);
  for (const ProductOperator* op : {&ops_->x2_q, &ops_->sigma_x_q, &ops_->parity_sigma_x, &ops_->sigma_z_q}) {
    const CVector direct = kron(op->osc.dense(), op->qubit) * s.amplitudes();
    EXPECT_LT((apply(*op, s) - direct).cwiseAbs().maxCoeff(), kTol);
  }
}

TEST_F(FockTest, CatStatesAreNormalizedParityEigenstates) {
  const int N = ops_->dim_osc;
  for (double x0 : {0.0, 0.1, 1.0, 3.0, 4.5}) {
    for (CatParity parity : {CatParity::even, CatParity::odd}) {
      const CVector c = cat_state(cplx{x0 / std::sqrt(2.0), 0.0}, parity, N);
      const TruncatedState s = TruncatedState::product(c, qubit_plus());
      EXPECT_NEAR(s.norm(), 1.0, kTol) << x0;
      const double expected = parity == CatParity::even ? 1.0 : -1.0;
      EXPECT_NEAR(expectation(s, ops_->parity_q).real(), expected, kTol) << x0;
    }
  }
}

TEST_F(FockTest, SmallOddCatApproachesSinglePhonon) {
  const CVector c = cat_state(cplx{1e-9, 0.0}, CatParity::odd, 16);
  EXPECT_NEAR(std::norm(c[1]), 1.0, 1e-12);
  const CVector c0 = cat_state(cplx{0.0, 0.0}, CatParity::odd, 16);
  EXPECT_NEAR(std::norm(c0[1]), 1.0, 0.0);
}

TEST_F(FockTest, CoherentStateMoments) {
  const int N = ops_->dim_osc;
  const double x0 = 3.0, p0 = -1.5;
  const TruncatedState s = TruncatedState::product(displaced_gaussian_state(x0, p0, N), qubit_plus());
  EXPECT_NEAR(expectation(s, ops_->x_q).real(), x0, 1e-9);
  EXPECT_NEAR(expectation(s, ops_->p_q).real(), p0, 1e-9);
  EXPECT_NEAR(expectation(s, ops_->x2_q).real(), x0 * x0 + 0.5, 1e-9);
  EXPECT_NEAR(expectation(s, ops_->number_q).real(), 0.5 * (x0 * x0 + p0 * p0), 1e-9);
}

TEST_F(FockTest, AbsolutePositionQuadrature) {
  const int N = ops_->dim_osc;
  CVector vac = CVector::Zero(N);
  vac[0] = 1.0;
  const TruncatedState ground = TruncatedState::product(vac, qubit_plus());
  // Gaussian with variance 1/2: E|x| = 1/√π
  EXPECT_NEAR(abs_position_expectation(ground, *ops_), 1.0 / std::sqrt(std::numbers::pi), 1e-6);
  const TruncatedState far = TruncatedState::product(displaced_gaussian_state(4.5, 0.0, N), qubit_plus());
  EXPECT_NEAR(abs_position_expectation(far, *ops_), 4.5, 1e-6);
}

TEST_F(FockTest, OscillatorPurity) {
  const int N = ops_->dim_osc;
  const TruncatedState product = TruncatedState::product(random_vector(N, 3), qubit_plus());
  EXPECT_NEAR(oscillator_purity(product), 1.0, kTol);
  TruncatedState bell(N);
  bell.amplitudes().setZero();
  bell.amplitudes()[0] = 1.0 / std::sqrt(2.0);
  bell.amplitudes()[N + 1] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(oscillator_purity(bell), 0.5, kTol);
}

TEST_F(FockTest, TopPopulationAndNormalize) {
  const int N = ops_->dim_osc;
  TruncatedState s(N);
  s.amplitudes().setZero();
  s.amplitudes()[N - 1] = 3.0;
  s.amplitudes()[0] = 4.0;
  s.normalize();
  EXPECT_NEAR(s.norm(), 1.0, kTol);
  EXPECT_NEAR(s.top_population(4), 9.0 / 25.0, kTol);
  EXPECT_FALSE(s.truncation_healthy());
}

TEST(FockErrors, RejectsBadDimensions) {
  EXPECT_THROW(build_operators(4), ConfigError);
  EXPECT_THROW(cat_state(cplx{4.0, 0.0}, CatParity::even, 32), ConfigError);
  const OperatorSet ops = build_operators(16);
  TruncatedState s(8);
  EXPECT_THROW(apply(ops.x2_q, s), UsageError);
}
