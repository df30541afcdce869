#include <gtest/gtest.h>

#include "blax/serieskernels.hpp"

namespace blax {
namespace {

// Reference values from a 40-digit direct summation of the defining series.
struct ResolventValue {
  int n;
  int k;
  Complex value;
};

const ResolventValue kResolventAt03_04i[] = {
    {1, 0, {1.0769230769230768850, 0.61538461538461538724}},
    {2, 1, {1.8579881656804732494, 1.9408284023668638667}},
    {3, 2, {4.8183887118798357556, 6.4050978607191622744}},
    {4, 5, {48.388991982073453676, 53.030916284443820451}},
};

TEST(Binomial, ExactValuesAndNegativeUpper) {
  EXPECT_EQ(binomial(10, 3), 120);
  EXPECT_EQ(binomial(3, 5), 0);
  EXPECT_EQ(binomial(5, -1), 0);
  EXPECT_EQ(binomial(-1, 3), -1);
  EXPECT_EQ(binomial(200, 100).str(),
            "90548514656103281165404177077484163874504589675413336841320");
}

TEST(Mu, ReciprocalBinomial) {
  EXPECT_EQ(mu(2, 3), Rational(1, 4));
  EXPECT_EQ(mu(3, 2), Rational(1, 6));
  EXPECT_EQ(mu(1, 7), Rational(1));
  EXPECT_THROW(mu(0, 1), DomainError);
}

TEST(RCoeff, ShiftedBinomials) {
  const SeriesSpec spec(3, 2);
  const int expected[] = {6, 10, 15, 21, 28, 36};
  for (int j = 0; j < 6; ++j) EXPECT_EQ(r_coeff(spec, j), expected[j]) << "j=" << j;
}

TEST(ShiftPolynomial, FrozenCoefficients) {
  const std::vector<BigInt> c32 = shift_polynomial(3, 2);
  ASSERT_EQ(c32.size(), 3u);
  EXPECT_EQ(c32[0], 6);
  EXPECT_EQ(c32[1], -8);
  EXPECT_EQ(c32[2], 3);
  const std::vector<BigInt> c43 = shift_polynomial(4, 3);
  ASSERT_EQ(c43.size(), 4u);
  EXPECT_EQ(c43[0], 20);
  EXPECT_EQ(c43[1], -45);
  EXPECT_EQ(c43[2], 36);
  EXPECT_EQ(c43[3], -10);
}

TEST(REval, MatchesHighPrecisionSeries) {
  const Complex z(0.3, 0.4);
  for (const ResolventValue& ref : kResolventAt03_04i) {
    const Complex got = r_eval({ref.n, ref.k}, z);
    EXPECT_LT(std::abs(got - ref.value) / std::abs(ref.value), 1e-13)
        << "n=" << ref.n << " k=" << ref.k;
  }
}

TEST(REval, ZeroReturnsConstantTerm) {
  EXPECT_EQ(r_eval({4, 3}, 0.0), Complex(20.0));
  EXPECT_THROW(r_eval_shifted_difference({2, 1}, 0.0), DomainError);
}

TEST(REval, RejectsPointsOutsideDisk) {
  EXPECT_THROW(r_eval({2, 0}, Complex(1.0, 0.0)), DomainError);
  EXPECT_THROW(r_eval({2, 0}, Complex(0.8, 0.8)), DomainError);
}

TEST(SeriesSpec, RejectsInvalidOrders) {
  EXPECT_THROW(SeriesSpec(0, 0), DomainError);
  EXPECT_THROW(SeriesSpec(2, -1), DomainError);
}

TEST(REval, TruncatedSeriesConverges) {
  const Complex z(0.5, -0.2);
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k <= 3; ++k) {
      EXPECT_LT(std::abs(r_eval_truncated({n, k}, z, 300) - r_eval({n, k}, z)), 1e-12);
    }
  }
}

TEST(ShiftedResolvent, ScalarAgreesWithREval) {
  const CMatrix A = CMatrix::Constant(1, 1, Complex(0.4, 0.3));
  const Complex z(0.5, 0.5);
  for (int k = 0; k <= 4; ++k) {
    const Complex expected = r_eval({3, k}, z * A(0, 0));
    EXPECT_LT(std::abs(shifted_resolvent(A, 3, k, z)(0, 0) - expected), 1e-12);
  }
}

TEST(ShiftedResolvent, PolynomialAndCombinationFormsAgree) {
  CMatrix A(3, 3);
  A << 0.2, 0.5, 0.0, Complex(0.0, 0.3), -0.4, 0.1, 0.0, 0.2, Complex(0.3, 0.3);
  const Complex z(0.6, -0.5);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 1; k <= 6; ++k) {
      const CMatrix a = shifted_resolvent(A, n, k, z);
      const CMatrix b = shifted_resolvent_by_combination(A, n, k, z);
      EXPECT_LT((a - b).norm() / a.norm(), 1e-12) << "n=" << n << " k=" << k;
    }
  }
}

// Every identity of the module at n <= 6 and k <= 10 on the default points.
TEST(VerifySeriesIdentities, AllPass) {
  for (int n = 1; n <= 6; ++n) {
    const Report r = verify_series_identities(n, 10, 40, default_sample_points());
    for (const Check& c : r.checks()) {
      EXPECT_TRUE(c.pass) << "n=" << n << " " << c.name << " residual " << c.residual << " at "
                          << c.witness;
    }
    EXPECT_EQ(r.checks().size(), 5u);
  }
}

TEST(VerifySeriesIdentities, RejectsPointsPastRadius) {
  EXPECT_THROW(verify_series_identities(2, 2, 10, {Complex(0.95, 0.0)}), DomainError);
}

TEST(DefaultSamplePoints, TwentyPointsInsideRadius) {
  const std::vector<Complex> pts = default_sample_points();
  ASSERT_EQ(pts.size(), 20u);
  for (Complex z : pts) EXPECT_LE(std::abs(z), 0.9 + 1e-15);
}

}  // namespace
}  // namespace blax
