#include <gtest/gtest.h>

#include <random>

#include "blax/beurlinglax.hpp"
#include "blax/random_pairs.hpp"
#include "blax/tvsystem.hpp"

namespace blax {
namespace {

// A = [[1/2, 0], [1/4, 1/3]], C = [1, 1], n = 2, B_j = [1/(j+1); -1/(j+2)],
// D_j = j/2, u(j) = j + 1, x(0) = e_1.
SystemSpec rational_system() {
  CMatrix A(2, 2);
  A << 0.5, 0.0, 0.25, 1.0 / 3.0;
  CMatrix C(1, 2);
  C << 1.0, 1.0;
  SystemSpec spec;
  spec.pair = OutputPair(A, C, 2);
  for (int j = 0; j <= 4; ++j) {
    StageColligation s;
    s.k = j;
    s.B = CMatrix(2, 1);
    s.B << 1.0 / (j + 1), -1.0 / (j + 2);
    s.D = CMatrix::Constant(1, 1, j / 2.0);
    spec.stages.push_back(s);
  }
  return spec;
}

std::vector<CVector> rational_inputs() {
  std::vector<CVector> u;
  for (int j = 0; j <= 4; ++j) u.push_back(CVector::Constant(1, j + 1.0));
  return u;
}

// Exact rational recursion evaluated with Python fractions.
TEST(Simulate, FrozenRationalTrace) {
  const SignalTrace t = simulate(rational_system(), CVector::Unit(2, 0), rational_inputs(), 4);
  const double y[] = {1.0, 9.0 / 2.0, 105.0 / 8.0, 119.0 / 4.0, 5501.0 / 96.0};
  ASSERT_EQ(t.T(), 4);
  ASSERT_EQ(t.states.size(), 6u);
  for (int j = 0; j <= 4; ++j) {
    EXPECT_NEAR(t.outputs[static_cast<std::size_t>(j)](0).real(), y[j], 1e-12) << "j=" << j;
  }
  EXPECT_NEAR(t.states[5](0).real(), 189.0 / 16.0, 1e-12);
  EXPECT_NEAR(t.states[5](1).real(), -1463.0 / 480.0, 1e-12);
}

TEST(Simulate, ClosedFormAgrees) {
  const SystemSpec spec = rational_system();
  const SignalTrace a = simulate(spec, CVector::Unit(2, 0), rational_inputs(), 4);
  const SignalTrace b = closed_form_trace(spec, CVector::Unit(2, 0), rational_inputs(), 4);
  EXPECT_LT(trace_difference(a, b), 1e-13);
}

TEST(Simulate, ZeroInputsBeyondLastStage) {
  const SystemSpec spec = rational_system();
  const SignalTrace t = simulate(spec, CVector::Unit(2, 0), rational_inputs(), 12);
  EXPECT_EQ(t.T(), 12);
  const SignalTrace c = closed_form_trace(spec, CVector::Unit(2, 0), rational_inputs(), 12);
  EXPECT_LT(trace_difference(t, c), 1e-12);
}

TEST(Simulate, NonzeroInputWithoutStage) {
  const SystemSpec spec = rational_system();
  std::vector<CVector> u = rational_inputs();
  u.push_back(CVector::Ones(1));
  try {
    simulate(spec, CVector::Zero(2), u, 6);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("step 5"), std::string::npos) << e.what();
  }
}

TEST(Simulate, InputSizeMismatch) {
  std::vector<CVector> u = rational_inputs();
  u[2] = CVector::Ones(3);
  EXPECT_THROW(simulate(rational_system(), CVector::Zero(2), u, 4), DimensionError);
}

TEST(SystemSpec, StageIndicesMustBeSequential) {
  SystemSpec spec = rational_system();
  spec.stages[3].k = 7;
  EXPECT_THROW(spec.validate(), DomainError);
}

// Property: superposition of input responses.
TEST(Simulate, Superposition) {
  std::mt19937_64 rng(51);
  const SystemSpec spec = rational_system();
  std::vector<CVector> u;
  std::vector<CVector> v;
  std::vector<CVector> sum;
  for (int j = 0; j <= 4; ++j) {
    u.push_back(random_complex_matrix(rng, 1, 1).col(0));
    v.push_back(random_complex_matrix(rng, 1, 1).col(0));
    sum.push_back(u.back() + v.back());
  }
  const SignalTrace a = simulate(spec, CVector::Zero(2), u, 8);
  const SignalTrace b = simulate(spec, CVector::Zero(2), v, 8);
  const SignalTrace ab = simulate(spec, CVector::Zero(2), sum, 8);
  for (int j = 0; j <= 8; ++j) {
    const auto i = static_cast<std::size_t>(j);
    EXPECT_LT((ab.outputs[i] - a.outputs[i] - b.outputs[i]).norm(), 1e-12 * (1.0 + ab.outputs[i].norm()));
  }
}

class InnerSystem : public ::testing::Test {
 protected:
  void SetUp() override {
    fam_ = build_inner_family(random_pairs(52, 1)[0], 4, 128);
    spec_ = system_from_family(fam_);
  }
  InnerFamily fam_;
  SystemSpec spec_;
};

TEST_F(InnerSystem, PulseResponseIsThetaTaylor) {
  for (const StageColligation& stage : spec_.stages) {
    if (stage.u() == 0) continue;
    std::vector<CVector> u;
    for (int j = 0; j < stage.k; ++j) u.push_back(CVector::Zero(spec_.stages[static_cast<std::size_t>(j)].u()));
    u.push_back(CVector::Unit(stage.u(), 0));
    const SignalTrace t = simulate(spec_, CVector::Zero(spec_.pair.d()), u, stage.k + 20);
    const TaylorTable theta = theta_taylor(spec_.pair, stage, 20);
    for (int j = 0; j <= 20; ++j) {
      const CVector expected = theta.coeffs[static_cast<std::size_t>(j)].col(0);
      EXPECT_LT((t.outputs[static_cast<std::size_t>(stage.k + j)] - expected).norm(), 1e-12)
          << "k=" << stage.k << " j=" << j;
    }
  }
}

TEST_F(InnerSystem, EnergyAndUnitarity) {
  std::mt19937_64 rng(53);
  const CVector x0 = random_complex_matrix(rng, spec_.pair.d(), 1).col(0);
  std::vector<CVector> u;
  for (const StageColligation& s : spec_.stages) u.push_back(random_complex_matrix(rng, s.u(), 1).col(0));
  const Report energy = energy_audit(spec_, x0, u, 256);
  for (const Check& c : energy.checks()) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
  }
  const Report ztransform = ztransform_reconcile(spec_, x0, u, 64);
  for (const Check& c : ztransform.checks()) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
  }
  const Report audit = weighted_colligation_audit(spec_, fam_.grams);
  for (const Check& c : audit.checks()) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
  }
  for (const StageColligation& s : spec_.stages) {
    EXPECT_LT(colligation_coisometry_defect(spec_.pair, s, fam_.grams).norm(), 1e-9);
    const CMatrix iso = colligation_isometry_defect(spec_.pair, s, fam_.grams);
    EXPECT_LT(iso.norm() / fam_.grams.shifted_at(s.k).norm(), 1e-9);
  }
}

TEST_F(InnerSystem, AuditNeedsNextGramian) {
  GramianOptions opts;
  opts.k_max = 1;
  EXPECT_THROW(weighted_colligation_audit(spec_, gramians(spec_.pair, opts)), PreconditionError);
}

}  // namespace
}  // namespace blax
