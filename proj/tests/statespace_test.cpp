#include <gtest/gtest.h>

#include <random>

#include "blax/random_pairs.hpp"
#include "blax/serieskernels.hpp"
#include "blax/statespace.hpp"

namespace blax {
namespace {

OutputPair reference_pair(int n) {
  CMatrix A(2, 2);
  A << Complex(0.5, 0.1), 0.2, 0.0, Complex(-0.3, 0.2);
  CMatrix C(1, 2);
  C << 1.0, Complex(0.5, -0.5);
  return OutputPair(A, C, n);
}

CMatrix hermitian2(double a, double b_re, double b_im, double c) {
  CMatrix M(2, 2);
  M << a, Complex(b_re, b_im), Complex(b_re, -b_im), c;
  return M;
}

// Reference gramians of reference_pair from a 600-term series summed at
// 40 digits.
TEST(Gramians, FrozenValuesForReferencePair) {
  GramianOptions opts;
  opts.k_max = 2;
  const GramianSet g1 = gramians(reference_pair(1), opts);
  EXPECT_LT((g1.G(1) - hermitian2(1.35135135135135135, 0.607679870317063096,
                                  -0.396485525562662679, 0.589484266277033912))
                .norm(),
            1e-13);
  const GramianSet g2 = gramians(reference_pair(2), opts);
  EXPECT_LT((g2.G(2) - hermitian2(1.82615047479912345, 0.733748930799355494,
                                  -0.298779800048432686, 0.687796319053966453))
                .norm(),
            1e-13);
  EXPECT_LT((g2.shifted_at(1) - hermitian2(3.17750182615047481, 1.34142880111641859,
                                           -0.695265325611095365, 1.27728058533100037))
                .norm(),
            1e-12);
  const GramianSet g3 = gramians(reference_pair(3), opts);
  EXPECT_LT((g3.shifted_at(2) - hermitian2(10.1741259155430083, 4.18190552265357453,
                                           -1.99255367392889693, 3.94402933267314651))
                .norm(),
            1e-11);
}

TEST(Gramians, OneZeroAnchors) {
  const OutputPair pair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
  GramianOptions opts;
  opts.k_max = 3;
  const GramianSet g = gramians(pair, opts);
  EXPECT_NEAR(g.G(0)(0, 0).real(), 0.5625, 1e-15);
  EXPECT_NEAR(g.G(1)(0, 0).real(), 0.75, 1e-14);
  EXPECT_NEAR(g.G(2)(0, 0).real(), 1.0, 1e-14);
  const double shifted[] = {1.0, 1.75, 2.5, 3.25};
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(g.shifted_at(k)(0, 0).real(), shifted[k], 1e-13);
}

TEST(Gramians, UnstablePairRejected) {
  const OutputPair pair(CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, 1.0), 1);
  EXPECT_THROW(gramians(pair), StabilityError);
}

TEST(OutputPair, ValidatesShapes) {
  EXPECT_THROW(OutputPair(CMatrix::Zero(2, 3), CMatrix::Zero(1, 3), 1), DimensionError);
  EXPECT_THROW(OutputPair(CMatrix::Zero(2, 2), CMatrix::Zero(1, 3), 1), DimensionError);
  EXPECT_THROW(OutputPair(CMatrix::Zero(2, 2), CMatrix::Zero(1, 2), 0), DomainError);
}

TEST(SteinSolve, ScalarClosedForm) {
  const CMatrix P = stein_solve(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 1.0));
  EXPECT_NEAR(P(0, 0).real(), 4.0 / 3.0, 1e-15);
}

// Property: the Stein solution satisfies its equation for random stable A.
TEST(SteinSolve, ResidualSmallOnRandomPairs) {
  for (const OutputPair& pair : random_pairs(11, 30)) {
    const CMatrix Q = pair.C.adjoint() * pair.C;
    const CMatrix P = stein_solve(pair.A, Q);
    EXPECT_LT((P - pair.A.adjoint() * P * pair.A - Q).norm() / std::max(1.0, P.norm()), 1e-12);
  }
}

// Property: shifted gramians obey the weighted Stein identity.
TEST(Gramians, WeightedSteinIdentity) {
  for (const OutputPair& pair : random_pairs(12, 20)) {
    GramianOptions opts;
    opts.k_max = 5;
    const GramianSet g = gramians(pair, opts);
    for (int k = 0; k < 5; ++k) {
      const CMatrix lhs = pair.A.adjoint() * g.shifted_at(k + 1) * pair.A +
                          binomial_value(pair.n + k - 1, k) * pair.C.adjoint() * pair.C;
      EXPECT_LT((lhs - g.shifted_at(k)).norm() / g.shifted_at(k).norm(), 1e-10);
    }
  }
}

TEST(Gramians, ShiftedFromPlainMatchesSeries) {
  const OutputPair pair = reference_pair(3);
  GramianOptions opts;
  opts.cross_check = false;
  const CMatrix G3 = gramians(pair, opts).G(3);
  for (int k = 0; k <= 4; ++k) {
    const CMatrix closed = shifted_gramian_from_plain(pair.A, G3, 3, k);
    const CMatrix series = gramian_series(pair.A, pair.C, 3, k, 400);
    EXPECT_LT((closed - series).norm() / series.norm(), 1e-12) << "k=" << k;
  }
}

TEST(GammaMap, ReducesOrder) {
  const OutputPair pair = reference_pair(3);
  const GramianSet g = gramians(pair);
  for (int m = 0; m <= 3; ++m) {
    EXPECT_LT((gamma_map(pair.A, g.G(3), m) - g.G(3 - m)).norm(), 1e-12) << "m=" << m;
  }
}

TEST(CheckedGramianInverse, RejectsSingular) {
  EXPECT_THROW(checked_gramian_inverse(CMatrix::Zero(2, 2), "test"), ObservabilityError);
}

TEST(Classify, OneZeroPairIsIsometric) {
  const OutputPair pair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
  const Classification c = classify_pair(pair, CMatrix::Identity(1, 1));
  EXPECT_TRUE(c.stein_equality);
  EXPECT_EQ(c.n_hypercontractive, Verdict::Pass);
  EXPECT_TRUE(c.n_isometric());
  EXPECT_TRUE(c.strongly_stable);
  EXPECT_TRUE(c.exactly_observable);
}

TEST(Classify, UnitaryScalarIsNotStronglyStable) {
  const OutputPair pair(CMatrix::Constant(1, 1, 1.0), CMatrix::Zero(1, 1), 1);
  const Classification c = classify_pair(pair, CMatrix::Identity(1, 1));
  EXPECT_FALSE(c.strongly_stable);
  EXPECT_FALSE(c.exactly_observable);
}

TEST(SteinUniqueness, Dichotomy) {
  const SteinUniquenessReport unique = stein_uniqueness_probe(
      OutputPair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 1.0), 1));
  EXPECT_TRUE(unique.unique);
  EXPECT_NEAR(unique.gramian(0, 0).real(), 4.0 / 3.0, 1e-12);

  const SteinUniquenessReport circle = stein_uniqueness_probe(
      OutputPair(CMatrix::Constant(1, 1, 1.0), CMatrix::Zero(1, 1), 1));
  EXPECT_FALSE(circle.unique);
  ASSERT_TRUE(circle.second_solution.has_value());
  EXPECT_LE(circle.second_residual, 1e-10);

  EXPECT_THROW(stein_uniqueness_probe(
                   OutputPair(CMatrix::Constant(1, 1, 1.5), CMatrix::Zero(1, 1), 1)),
               PreconditionError);
}

TEST(Squeeze, HoldsForHContraction) {
  CMatrix H(2, 2);
  H << 2.0, 0.5, 0.5, 1.0;
  CMatrix K(2, 2);
  K << 0.3, 0.2, Complex(0.0, 0.1), -0.4;
  const CMatrix A = hermitian_inv_sqrt(H) * K * hermitian_sqrt(H);
  const SqueezeReport r = squeeze_check(A, H, 4);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.min_eigenvalues.size(), 3u);
}

TEST(Squeeze, RejectsFailedHypotheses) {
  const CMatrix H = CMatrix::Identity(1, 1);
  EXPECT_THROW(squeeze_check(CMatrix::Constant(1, 1, 2.0), H, 3), PreconditionError);
}

TEST(MetricConstraints, OneZeroStageSatisfiesAll) {
  const OutputPair pair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
  GramianOptions opts;
  opts.k_max = 1;
  const GramianSet g = gramians(pair, opts);
  // Stage 0 from the closed forms: |B_0| = 0.566947, D_0 = 0.661438.
  StageColligation s;
  s.k = 0;
  s.B = CMatrix::Constant(1, 1, -0.56694670951384084082);
  s.D = CMatrix::Constant(1, 1, 0.66143782776614764763);
  const Report r = metric_constraint_check(pair, s, g);
  EXPECT_EQ(r.checks().size(), 4u);
  for (const Check& c : r.checks()) EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
}

}  // namespace
}  // namespace blax
