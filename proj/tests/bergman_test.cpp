#include <gtest/gtest.h>

#include <random>

#include "blax/bergman.hpp"
#include "blax/random_pairs.hpp"
#include "blax/serieskernels.hpp"

namespace blax {
namespace {

BergmanElement monomial(int n, int j, int N) {
  CMatrix c = CMatrix::Zero(1, N + 1);
  c(0, j) = 1.0;
  return BergmanElement(n, c);
}

OutputPair onezero_pair() {
  return OutputPair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
}

TEST(BergmanInner, WeightedCoefficients) {
  CMatrix c = CMatrix::Zero(1, 3);
  c(0, 0) = 1.0;
  c(0, 1) = 1.0;
  EXPECT_NEAR(bergman_norm_squared(BergmanElement(2, c)), 1.5, 1e-15);
  EXPECT_NEAR(bergman_norm_squared(BergmanElement(3, c)), 4.0 / 3.0, 1e-15);
  // Linear in the first argument.
  const BergmanElement f(2, c * Complex(0.0, 1.0));
  EXPECT_NEAR(std::abs(bergman_inner(f, BergmanElement(2, c)) - Complex(0.0, 1.5)), 0.0, 1e-15);
}

TEST(ShiftAdjoint, MonomialRatio) {
  // S* z^j = j / (j + n - 1) z^{j-1}.
  for (int n = 1; n <= 4; ++n) {
    for (int j = 1; j <= 6; ++j) {
      const BergmanElement g = shift_adjoint_apply(monomial(n, j, 8));
      EXPECT_NEAR(g.coeffs(0, j - 1).real(), static_cast<double>(j) / (j + n - 1), 1e-15);
      EXPECT_NEAR(g.coeffs.norm(), static_cast<double>(j) / (j + n - 1), 1e-15);
    }
  }
}

TEST(ShiftAdjoint, PowerMatchesRepeatedApplication) {
  std::mt19937_64 rng(21);
  const BergmanElement f(3, random_complex_matrix(rng, 2, 20));
  BergmanElement g = f;
  for (int k = 0; k < 4; ++k) g = shift_adjoint_apply(g);
  EXPECT_LT((shift_adjoint_power(f, 4).coeffs - g.coeffs).norm(), 1e-13);
}

// Property: <S f, g> = <f, S* g> in the weighted inner product.
TEST(ShiftAdjoint, AdjointRelation) {
  std::mt19937_64 rng(22);
  for (int n = 1; n <= 4; ++n) {
    CMatrix cf = random_complex_matrix(rng, 2, 21);
    cf.col(20).setZero();
    const BergmanElement f(n, cf);
    const BergmanElement g(n, random_complex_matrix(rng, 2, 21));
    const Complex lhs = bergman_inner(shift_apply(f), g);
    const Complex rhs = bergman_inner(f, shift_adjoint_apply(g));
    EXPECT_LT(std::abs(lhs - rhs), 1e-13) << "n=" << n;
  }
}

TEST(ObservabilityApply, OneZeroCoefficients) {
  const BergmanElement f = observability_apply(onezero_pair(), 0, CVector::Ones(1), 4);
  EXPECT_NEAR(f.coeffs(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(f.coeffs(0, 1).real(), 0.75, 1e-15);
  EXPECT_NEAR(f.coeffs(0, 2).real(), 0.5625, 1e-15);
  const BergmanElement g = observability_apply(onezero_pair(), 1, CVector::Ones(1), 2);
  // binom(j + 2, j + 1) C A^j.
  EXPECT_NEAR(g.coeffs(0, 0).real(), 1.5, 1e-15);
  EXPECT_NEAR(g.coeffs(0, 1).real(), 1.125, 1e-15);
}

TEST(ObservabilityApply, NormIsGramian) {
  const BergmanElement f = observability_apply(onezero_pair(), 0, CVector::Ones(1), 400);
  EXPECT_NEAR(bergman_norm_squared(f), 1.0, 1e-12);
}

TEST(ModelPair, ShiftedGramianDiagonal) {
  EXPECT_EQ(model_shifted_gramian_diag(2, 1, 3), Rational(5, 4));
  EXPECT_EQ(model_shifted_gramian_diag(3, 2, 0), Rational(6));
  EXPECT_EQ(model_shifted_gramian_diag(1, 4, 9), Rational(1));
}

TEST(ModelPair, OrthonormalCoordinates) {
  const OutputPair model = model_pair(2, 1, 30);
  EXPECT_EQ(model.d(), 31);
  const CMatrix G = gramian_series(model.A, model.C, 2, 0, 40);
  EXPECT_LT((G - CMatrix::Identity(31, 31)).norm(), 1e-12);
}

TEST(Kernels, OneZeroSubspaceKernelClosedForm) {
  const OutputPair pair = onezero_pair();
  GramianOptions opts;
  opts.k_max = 2;
  const GramianSet g = gramians(pair, opts);
  const std::vector<GridPoint> grid = {{0.0, 0.0}, {Complex(0.3, 0.2), Complex(-0.1, 0.4)}};
  const KernelGrid kg = kernel_eval(KernelKind::kSubspace, pair, g, nullptr, 0, grid);
  EXPECT_NEAR(std::abs(kg.values[0](0, 0) - 0.4375), 0.0, 1e-14);
  const Complex z = grid[1].z;
  const Complex zeta = grid[1].zeta;
  const Complex alpha = 0.5;
  const double w = 0.75;
  const Complex expected = 1.0 / std::pow(1.0 - z * std::conj(zeta), 2) -
                           w * w / (std::pow(1.0 - z * std::conj(alpha), 2) *
                                    std::pow(1.0 - alpha * std::conj(zeta), 2));
  EXPECT_LT(std::abs(kg.values[1](0, 0) - expected), 1e-13);
}

TEST(Kernels, SubspaceKernelVanishesAtZero) {
  // Functions in M vanish at alpha = 0.5.
  const OutputPair pair = onezero_pair();
  GramianOptions opts;
  opts.k_max = 1;
  const GramianSet g = gramians(pair, opts);
  const std::vector<GridPoint> grid = {{0.5, Complex(0.2, -0.3)}};
  const KernelGrid kg = kernel_eval(KernelKind::kSubspace, pair, g, nullptr, 0, grid);
  EXPECT_LT(kg.values[0].norm(), 1e-14);
}

// Property: every kernel kind is Hermitian on the default grid.
TEST(Kernels, HermitianSymmetry) {
  const std::vector<GridPoint> grid = default_grid();
  RandomPairRanges ranges;
  ranges.max_d = 3;
  for (const OutputPair& pair : random_pairs(23, 3, ranges)) {
    GramianOptions opts;
    opts.k_max = 3;
    const GramianSet g = gramians(pair, opts);
    const CMatrix H = g.G(pair.n);
    for (KernelKind kind : {KernelKind::kObservability, KernelKind::kSubspace,
                            KernelKind::kShiftedRange, KernelKind::kShiftedSubspace,
                            KernelKind::kDifference, KernelKind::kWandering}) {
      const KernelGrid kg = kernel_eval(kind, pair, g, &H, 2, grid);
      ASSERT_EQ(kg.values.size(), grid.size());
      double scale = 1.0;
      for (const CMatrix& v : kg.values) scale = std::max(scale, v.norm());
      EXPECT_LT(hermitian_symmetry_defect(kg) / scale, 1e-12) << to_string(kind);
    }
  }
}

TEST(Kernels, DefaultGridIsTensorProduct) {
  const std::vector<GridPoint> grid = default_grid();
  EXPECT_EQ(grid.size(), 400u);
  EXPECT_EQ(format_point(grid.front()).empty(), false);
}

TEST(CauchyDual, RelationsHold) {
  for (int n = 1; n <= 3; ++n) {
    const Report r = cauchy_dual_checks(n, 3, 48);
    for (const Check& c : r.checks()) EXPECT_TRUE(c.pass) << "n=" << n << " " << c.name;
  }
}

TEST(Orthocomplement, DecompositionOfShiftedSubspace) {
  for (int k = 0; k <= 2; ++k) {
    const Report r = smperp_decomposition_check(onezero_pair(), k, 48);
    for (const Check& c : r.checks()) EXPECT_TRUE(c.pass) << "k=" << k << " " << c.name;
  }
}

TEST(BergmanElement, RejectsBadWeight) {
  EXPECT_THROW(BergmanElement(0, CMatrix::Zero(1, 2)), DomainError);
}

}  // namespace
}  // namespace blax
