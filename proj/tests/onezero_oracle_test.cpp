#include <gtest/gtest.h>

#include <random>

#include "blax/bergman.hpp"
#include "blax/onezero_oracle.hpp"

namespace blax {
namespace {

TEST(OneZeroOracle, AnchorsAtHalf) {
  const OneZeroOracle o = oracle_all({Complex(0.5, 0.0), 2}, 3);
  EXPECT_NEAR(o.plain()[2], 1.0, 1e-15);
  EXPECT_NEAR(o.plain()[1], 0.75, 1e-15);
  const double shifted[] = {1.0, 1.75, 2.5, 3.25, 4.0};
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(o.shifted()[static_cast<std::size_t>(k)], shifted[k], 1e-13);
  EXPECT_NEAR(o.theta(0, 0.0).real(), 0.66143782776614764763, 1e-13);
  EXPECT_NEAR(o.F(1, 0.0).real(), -0.43301270189221932338, 1e-14);
  EXPECT_NEAR(o.kM(0.0, 0.0).real(), 0.4375, 1e-15);
  EXPECT_NEAR(std::abs(o.B()[0]), 0.56694670951384084082, 1e-13);
  EXPECT_NEAR(o.D()[0], 0.66143782776614764763, 1e-13);
}

// Values at alpha = 0.7i, n = 3 from a 40-digit evaluation.
TEST(OneZeroOracle, FrozenValuesAtImaginaryAlpha) {
  const OneZeroOracle o = oracle_all({Complex(0.0, 0.7), 3}, 2);
  const double plain[] = {0.132651, 0.2601, 0.51, 1.0};
  for (int j = 0; j <= 3; ++j) EXPECT_NEAR(o.plain()[static_cast<std::size_t>(j)], plain[j], 1e-14);
  const double shifted[] = {1.0, 1.7701, 2.8003, 4.0906};
  for (int k = 0; k <= 3; ++k) {
    EXPECT_NEAR(o.shifted()[static_cast<std::size_t>(k)], shifted[k], 1e-13);
    EXPECT_NEAR(o.shifted_power_sum()[static_cast<std::size_t>(k)], shifted[k], 1e-12);
  }
  const double absB[] = {0.27375140896018933758, 0.28334444995690699251, 0.26359374606975185077};
  const double D[] = {0.93131573593491911963, 0.50832420700340890041, 0.34539308752657525217};
  const double theta[] = {0.92908176952250493204, 1.5023127463219382822, 2.0245691778905036846};
  for (int k = 0; k <= 2; ++k) {
    const auto i = static_cast<std::size_t>(k);
    EXPECT_NEAR(std::abs(o.B()[i]), absB[k], 1e-13);
    EXPECT_NEAR(o.D()[i], D[k], 1e-13);
    EXPECT_NEAR(std::abs(o.theta(k, Complex(0.3, 0.2))), theta[k], 1e-12);
  }
}

TEST(OneZeroOracle, ResolventFormsAgree) {
  const OneZeroOracle o = oracle_all({Complex(0.4, 0.3), 4}, 3);
  for (int k = 0; k <= 4; ++k) {
    for (Complex x : {Complex(0.0, 0.0), Complex(0.25, 0.0), Complex(0.2, -0.5)}) {
      EXPECT_LT(std::abs(o.r_closed(k, x) - o.r_series(k, x)), 1e-12 * std::abs(o.r_closed(k, x)));
    }
  }
}

TEST(OneZeroOracle, ThetaFormsAgree) {
  const OneZeroOracle o = oracle_all({Complex(-0.3, 0.6), 3}, 4);
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.7, 0.3), Complex(0.0, 0.0)}) {
    for (int k = 0; k <= 4; ++k) {
      EXPECT_LT(std::abs(o.theta(k, z) - o.theta_factored(k, z)), 1e-12) << "k=" << k;
    }
    EXPECT_LT(std::abs(o.theta(0, z) - o.theta0(z)), 1e-12);
  }
}

TEST(OneZeroOracle, ClassicalCaseIsBlaschke) {
  const Complex alpha(0.2, 0.5);
  const OneZeroOracle o = oracle_all({alpha, 1}, 3);
  for (int k = 0; k <= 3; ++k) {
    EXPECT_LT(std::abs(std::abs(o.theta(k, Complex(0.4, -0.4))) -
                       std::abs(o.blaschke(Complex(0.4, -0.4)))),
              1e-13);
  }
}

// Property: the two shifted-gramian forms agree for random alpha.
TEST(OneZeroOracle, ShiftedFormsAgreeForRandomAlpha) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> radius(0.05, 0.95);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex alpha = std::polar(radius(rng), phase(rng));
    for (int n = 1; n <= 5; ++n) {
      const OneZeroOracle o = oracle_all({alpha, n}, 11);
      EXPECT_TRUE(o.shifted_forms_agree()) << "alpha=" << alpha << " n=" << n << " gap "
                                           << o.shifted_discrepancy();
    }
  }
}

TEST(OneZeroOracle, SelfChecksPass) {
  const OneZeroOracle o = oracle_all({Complex(0.0, 0.7), 2}, 4);
  const Report report = o.self_checks(default_grid());
  for (const Check& c : report.checks()) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
  }
}

TEST(OneZeroOracle, PipelineAgreement) {
  for (int n : {1, 2, 3}) {
    const Report r = oracle_vs_pipeline({Complex(0.3, 0.0), n}, 3, default_grid(), 128);
    for (const Check& c : r.checks()) {
      EXPECT_TRUE(c.pass) << "n=" << n << " " << c.name << " " << c.residual << " " << c.witness;
    }
  }
}

TEST(OneZeroSpec, RejectsDegenerateAlpha) {
  EXPECT_THROW(oracle_all({Complex(0.0, 0.0), 2}, 1), DomainError);
  EXPECT_THROW(oracle_all({Complex(1.0, 0.0), 2}, 1), DomainError);
  EXPECT_THROW(oracle_all({Complex(0.5, 0.0), 0}, 1), DomainError);
}

}  // namespace
}  // namespace blax
