#include <gtest/gtest.h>

#include <random>

#include "blax/corelinalg.hpp"
#include "blax/random_pairs.hpp"

namespace blax {
namespace {

TEST(Ipow, NegativeExponentInverts) {
  EXPECT_DOUBLE_EQ(ipow(2.0, 10), 1024.0);
  EXPECT_DOUBLE_EQ(ipow(2.0, -3), 0.125);
  EXPECT_EQ(ipow(Complex(0.0, 1.0), 2), Complex(-1.0, 0.0));
}

TEST(SpectralRadius, TriangularMatrixReadsDiagonal) {
  CMatrix M(2, 2);
  M << 0.5, 1.0, 0.0, Complex(0.0, -0.7);
  EXPECT_NEAR(spectral_radius(M), 0.7, 1e-14);
}

TEST(SpectralRadius, RejectsNonSquare) {
  EXPECT_THROW(spectral_radius(CMatrix::Zero(2, 3)), DimensionError);
}

TEST(PsdVerdict, ThreeWayBand) {
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 0) = 1.0;
  M(1, 1) = -5e-11;
  EXPECT_EQ(psd_verdict(M), Verdict::Pass);
  M(1, 1) = -5e-10;
  EXPECT_EQ(psd_verdict(M), Verdict::Indeterminate);
  M(1, 1) = -1e-8;
  EXPECT_EQ(psd_verdict(M), Verdict::Fail);
}

TEST(PsdFactor, RankAndCanonicalPhase) {
  std::mt19937_64 rng(3);
  const CMatrix X = random_complex_matrix(rng, 5, 2);
  const CMatrix M = X * X.adjoint();
  const CMatrix V = psd_factor(M);
  ASSERT_EQ(V.cols(), 2);
  EXPECT_LT((V * V.adjoint() - M).norm() / M.norm(), 1e-12);
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    Eigen::Index arg = 0;
    V.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_EQ(V(arg, c).imag(), 0.0);
    EXPECT_GT(V(arg, c).real(), 0.0);
  }
  // Descending eigenvalue order.
  EXPECT_GE(V.col(0).squaredNorm(), V.col(1).squaredNorm());
}

TEST(PsdFactor, IndependentOfFactorUsedToFormM) {
  std::mt19937_64 rng(4);
  const CMatrix X = random_complex_matrix(rng, 3, 3);
  const CMatrix W = random_complex_matrix(rng, 3, 3).householderQr().householderQ();
  const CMatrix V1 = psd_factor(CMatrix(X * X.adjoint()));
  const CMatrix V2 = psd_factor(CMatrix((X * W) * (X * W).adjoint()));
  EXPECT_LT((V1 - V2).norm(), 1e-10);
}

TEST(PsdFactor, ZeroMatrixHasNoColumns) {
  EXPECT_EQ(psd_factor(CMatrix::Zero(3, 3)).cols(), 0);
}

TEST(PsdFactor, IndefiniteThrows) {
  CMatrix M = CMatrix::Identity(2, 2);
  M(1, 1) = -0.5;
  EXPECT_THROW(psd_factor(M), NotPsdError);
}

TEST(HermitianSqrt, SquaresBack) {
  std::mt19937_64 rng(5);
  const CMatrix X = random_complex_matrix(rng, 4, 4);
  const CMatrix M = X * X.adjoint() + CMatrix::Identity(4, 4);
  const CMatrix S = hermitian_sqrt(M);
  EXPECT_LT((S * S - M).norm() / M.norm(), 1e-13);
  const CMatrix Si = hermitian_inv_sqrt(M);
  EXPECT_LT((Si * M * Si - CMatrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(SolveLinear, SingularSystemReportsCondition) {
  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = 1.0;
  try {
    solve_linear(A, CMatrix::Identity(2, 2));
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_GT(e.condition_estimate(), 1e12);
  }
}

TEST(SolveLinear, DimensionMismatch) {
  EXPECT_THROW(solve_linear(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), DimensionError);
}

// Property: the spectral radius is invariant under similarity.
TEST(SpectralRadius, SimilarityInvariant) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix M = random_complex_matrix(rng, 4, 4);
    const CMatrix T = CMatrix::Identity(4, 4) + 0.3 * random_complex_matrix(rng, 4, 4);
    const CMatrix S = T * M * solve_linear(T, CMatrix::Identity(4, 4));
    EXPECT_NEAR(spectral_radius(S), spectral_radius(M), 1e-9 * std::max(1.0, spectral_radius(M)));
  }
}

}  // namespace
}  // namespace blax
