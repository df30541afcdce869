#include "blax/verify_suite.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "blax/beurlinglax.hpp"
#include "blax/bergman.hpp"
#include "blax/corelinalg.hpp"
#include "blax/onezero_oracle.hpp"
#include "blax/random_pairs.hpp"
#include "blax/serieskernels.hpp"
#include "blax/statespace.hpp"
#include "blax/tvsystem.hpp"

namespace blax {
namespace {

constexpr int kCriterionPairs = 50;

std::string tag_of(const char* what, std::size_t i) {
  return std::string(what) + " " + std::to_string(i);
}

std::string describe_pair(const OutputPair& pair) {
  return "d=" + std::to_string(pair.d()) + " p=" + std::to_string(pair.p()) +
         " n=" + std::to_string(pair.n);
}

double rel(const CMatrix& X, const CMatrix& ref) {
  return (X - ref).norm() / std::max(1.0, ref.norm());
}

CVector random_vector(std::mt19937_64& rng, Eigen::Index size) {
  return random_complex_matrix(rng, size, 1).col(0);
}

std::vector<OutputPair> criterion_pairs(std::uint64_t seed) {
  return random_pairs(seed, kCriterionPairs, RandomPairRanges{});
}

// Runs fn and converts a thrown library error into a failed check.
Report guarded(const std::string& name, const std::function<Report()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    Report r;
    r.add_flag(name + ".completed", false, e.what());
    return r;
  }
}

CMatrix random_stage_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  return 0.5 * random_complex_matrix(rng, rows, cols);
}

SystemSpec random_system(std::mt19937_64& rng, int K) {
  std::uniform_int_distribution<int> dist_d(1, 4);
  std::uniform_int_distribution<int> dist_p(1, 3);
  std::uniform_int_distribution<int> dist_n(1, 4);
  std::uniform_int_distribution<int> dist_u(0, 3);
  std::uniform_real_distribution<double> dist_rho(0.6, 0.9);
  const int d = dist_d(rng);
  const int p = dist_p(rng);
  const int n = dist_n(rng);
  const double rho = dist_rho(rng);
  SystemSpec spec;
  spec.pair = random_pair(rng, d, p, n, rho);
  for (int k = 0; k <= K; ++k) {
    StageColligation s;
    s.k = k;
    const int u = dist_u(rng);
    s.B = random_stage_matrix(rng, d, u);
    s.D = random_stage_matrix(rng, p, u);
    spec.stages.push_back(std::move(s));
  }
  return spec;
}

std::vector<CVector> random_inputs(std::mt19937_64& rng, const SystemSpec& spec, int count) {
  std::vector<CVector> inputs;
  for (int k = 0; k < count && k <= spec.K(); ++k) {
    inputs.push_back(random_vector(rng, spec.stages[static_cast<std::size_t>(k)].u()));
  }
  return inputs;
}

}  // namespace

void absorb(Report& agg, const Report& r, const std::string& tag) {
  for (const Check& c : r.checks()) {
    Check* existing = nullptr;
    for (Check& e : agg.checks()) {
      if (e.name == c.name) {
        existing = &e;
        break;
      }
    }
    const std::string witness = c.witness.empty() ? tag : tag + ": " + c.witness;
    if (existing == nullptr) {
      agg.add(c.name, c.residual, c.tolerance, witness).pass = c.pass;
      continue;
    }
    const bool worse = std::isnan(c.residual) ? !std::isnan(existing->residual)
                                              : (!std::isnan(existing->residual) &&
                                                 c.residual > existing->residual);
    if (worse || (!c.pass && existing->pass)) {
      existing->residual = c.residual;
      existing->witness = witness;
      existing->tolerance = c.tolerance;
    }
    existing->pass = existing->pass && c.pass;
  }
}

// ---------------------------------------------------------------------------
// Criterion 1

Report criterion_series() {
  Report agg;
  const std::vector<Complex> samples = default_sample_points();
  for (int n = 1; n <= 6; ++n) {
    absorb(agg, verify_series_identities(n, 10, 40, samples), "n=" + std::to_string(n));
  }
  // n = 1 collapses every shift to the Szego kernel.
  MaxResidual collapse;
  bool coeffs_one = true;
  for (int k = 0; k <= 10; ++k) {
    for (int j = 0; j <= 40; ++j) coeffs_one = coeffs_one && r_coeff({1, k}, j) == 1;
    for (Complex z : samples) {
      const Complex expected = 1.0 / (1.0 - z);
      collapse.observe_lazy(std::abs(r_eval({1, k}, z) - expected) / std::abs(expected),
                            [&] { return "k=" + std::to_string(k); });
    }
  }
  agg.add_flag("series.n1_coefficients_are_one", coeffs_one);
  agg.add("series.n1_szego_collapse", collapse.value(), 1e-10, collapse.witness());
  bool exact = true;
  for (int n = 1; n <= 6; ++n) {
    for (int j = 0; j <= 60; ++j) {
      exact = exact && mu(n, j) * Rational(binomial(j + n - 1, j)) == Rational(1);
    }
  }
  agg.add_flag("series.mu_times_binomial_exact", exact);
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 2 and the gramian invariants

Report criterion_gramians(std::uint64_t seed) {
  Report agg;
  const std::vector<OutputPair> pairs = criterion_pairs(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const OutputPair& pair = pairs[i];
    const std::string tag = tag_of("pair", i) + " (" + describe_pair(pair) + ")";
    // Random draws happen outside the guard so the stream stays aligned.
    const CMatrix R = random_complex_matrix(rng, 2, pair.d());
    const CMatrix T = CMatrix::Identity(pair.d(), pair.d()) +
                      0.3 * random_complex_matrix(rng, pair.d(), pair.d());
    absorb(agg, guarded("gramian", [&] {
             Report r;
             GramianOptions opts;
             opts.k_max = 6;
             opts.cross_check = false;
             const GramianSet g = gramians(pair, opts);
             const int n = pair.n;
             double plain = 0.0;
             for (int m = 1; m <= n; ++m) {
               plain = std::max(plain, rel(g.G(m), gramian_series(pair.A, pair.C, m, 0, 200)));
             }
             r.add("gramian.stein_vs_series", plain, 1e-8);
             double shifted = 0.0;
             double weighted = 0.0;
             for (int k = 0; k <= 6; ++k) {
               shifted = std::max(shifted, rel(g.shifted_at(k),
                                               gramian_series(pair.A, pair.C, n, k, 200)));
               if (k < 6) {
                 const CMatrix lhs = pair.A.adjoint() * g.shifted_at(k + 1) * pair.A +
                                     binomial_value(n + k - 1, k) * pair.C.adjoint() * pair.C;
                 weighted = std::max(weighted, rel(lhs, g.shifted_at(k)));
               }
             }
             r.add("gramian.shifted_closed_vs_series", shifted, 1e-8);
             r.add("gramian.weighted_stein", weighted, 1e-9);
             double ladder = 0.0;
             for (int k = 0; k <= n; ++k) {
               ladder = std::max(ladder, rel(gamma_map(pair.A, g.G(n), k), g.G(n - k)));
             }
             r.add("gramian.gamma_ladder", ladder, 1e-9);

             // H from an enlarged output solves the Stein inequality system.
             CMatrix C_big(pair.p() + R.rows(), pair.d());
             C_big << pair.C, R;
             GramianOptions plain_opts;
             plain_opts.cross_check = false;
             const CMatrix H = gramians(OutputPair(pair.A, C_big, n), plain_opts).G(n);
             const double h = std::max(1.0, hermitian_norm(H));
             r.add("gramian.minimality", std::max(0.0, -min_eigenvalue(CMatrix(H - g.G(n))) / h),
                   1e-9);

             const CMatrix Tinv = solve_linear(T, CMatrix::Identity(pair.d(), pair.d()));
             const OutputPair similar(T * pair.A * Tinv, pair.C * Tinv, n);
             const CMatrix G_sim = gramians(similar, plain_opts).G(n);
             r.add("gramian.similarity_congruence", rel(G_sim, Tinv.adjoint() * g.G(n) * Tinv),
                   1e-8);
             return r;
           }),
           tag);
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 3

Report criterion_onezero() {
  Report agg;
  const std::vector<GridPoint> grid = default_grid();
  for (int n : {1, 2, 3}) {
    for (Complex alpha : {Complex(0.5, 0.0), Complex(0.3, 0.0), Complex(0.0, 0.7)}) {
      const OneZeroSpec spec{alpha, n};
      std::ostringstream tag;
      tag << "n=" << n << " alpha=(" << alpha.real() << "," << alpha.imag() << ")";
      absorb(agg, guarded("onezero", [&] { return oracle_vs_pipeline(spec, 4, grid); }),
             tag.str());
    }
  }

  // Anchors at n = 2, alpha = 0.5, printed to six digits.
  const OneZeroSpec anchor{Complex(0.5, 0.0), 2};
  const OneZeroOracle oracle = oracle_all(anchor, 4);
  const OutputPair pair(CMatrix::Constant(1, 1, oracle.A()),
                        CMatrix::Constant(1, 1, Complex(oracle.C())), 2);
  GramianOptions opts;
  opts.k_max = 2;
  const GramianSet g = gramians(pair, opts);
  const InnerFamily fam = build_inner_family(pair, 1, 64);
  const Approach1Result a1 = approach1_build(pair, {GridPoint{0.0, 0.0}}, 16);
  auto anchor_check = [&](const char* name, double oracle_value, double pipeline_value,
                          double expected) {
    const double r = std::max(std::abs(oracle_value - expected), std::abs(pipeline_value - expected));
    std::ostringstream os;
    os << "oracle " << oracle_value << " pipeline " << pipeline_value << " expected " << expected;
    agg.add(std::string("onezero.anchor.") + name, r, 5e-7, os.str());
  };
  anchor_check("G2", oracle.plain()[2], g.G(2)(0, 0).real(), 1.0);
  anchor_check("G1", oracle.plain()[1], g.G(1)(0, 0).real(), 0.75);
  anchor_check("shifted_G1", oracle.shifted()[1], g.shifted_at(1)(0, 0).real(), 1.75);
  anchor_check("theta0_at_0", std::abs(oracle.theta(0, 0.0)),
               std::abs(theta_stage(pair, fam.stages[0], 0.0)(0, 0)), 0.661438);
  // F_1(0) carries a phase in the pipeline; its modulus is compared.
  anchor_check("F1_at_0", oracle.F(1, 0.0).real(), -std::abs(a1.family.f(1, 0.0)(0, 0)),
               -0.433013);

  // The two shifted-gramian forms over random alpha.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> radius(0.05, 0.95);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  MaxResidual forms;
  for (int trial = 0; trial < 20; ++trial) {
    const Complex alpha = std::polar(radius(rng), phase(rng));
    for (int n = 1; n <= 5; ++n) {
      const OneZeroOracle o = oracle_all({alpha, n}, 11);
      forms.observe_lazy(o.shifted_discrepancy(), [&] {
        std::ostringstream os;
        os << "n=" << n << " alpha=" << alpha;
        return os.str();
      });
    }
  }
  agg.add("onezero.oracle.shifted_forms_random_alpha", forms.value(), 1e-12, forms.witness());
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 4

Report criterion_inner_family(std::uint64_t seed, int N) {
  Report agg;
  const std::vector<GridPoint> grid = default_grid();
  const std::vector<OutputPair> pairs = criterion_pairs(seed);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    absorb(agg, guarded("inner", [&] {
             const InnerFamily fam = build_inner_family(pairs[i], 6, N);
             return verify_inner_family(fam, grid, N);
           }),
           tag_of("pair", i) + " (" + describe_pair(pairs[i]) + ")");
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 5

Report criterion_simulator(std::uint64_t seed, int N) {
  Report agg;
  constexpr int kPairs = 10;
  constexpr int kK = 6;
  constexpr int kCoefficients = 50;
  const std::vector<OutputPair> pairs = random_pairs(seed + 5, kPairs, RandomPairRanges{});
  std::mt19937_64 rng(seed + 55);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CVector x0 = random_vector(rng, pairs[i].d());
    std::vector<CVector> raw_inputs;
    for (int k = 0; k <= kK; ++k) raw_inputs.push_back(random_vector(rng, 4));
    absorb(agg, guarded("simulator", [&] {
             Report r;
             const InnerFamily fam = build_inner_family(pairs[i], kK + 1, N);
             SystemSpec spec = system_from_family(fam);
             spec.stages.pop_back();

             MaxResidual pulse;
             for (const StageColligation& stage : spec.stages) {
               const int k = stage.k;
               const TaylorTable theta = theta_taylor(spec.pair, stage, kCoefficients - 1);
               for (Eigen::Index c = 0; c < stage.u(); ++c) {
                 std::vector<CVector> inputs(static_cast<std::size_t>(k + 1));
                 for (int j = 0; j < k; ++j) {
                   inputs[static_cast<std::size_t>(j)] =
                       CVector::Zero(spec.stages[static_cast<std::size_t>(j)].u());
                 }
                 inputs[static_cast<std::size_t>(k)] = CVector::Unit(stage.u(), c);
                 const SignalTrace trace = simulate(spec, CVector::Zero(spec.pair.d()), inputs,
                                                    k + kCoefficients - 1);
                 for (int j = 0; j < k + kCoefficients; ++j) {
                   const CVector expected =
                       j < k ? CVector::Zero(spec.pair.p())
                             : CVector(theta.coeffs[static_cast<std::size_t>(j - k)].col(c));
                   const CVector& got = trace.outputs[static_cast<std::size_t>(j)];
                   pulse.observe_lazy((got - expected).norm() / std::max(1.0, expected.norm()),
                                      [&] {
                                        return "k=" + std::to_string(k) + " j=" + std::to_string(j);
                                      });
                 }
               }
             }
             r.add("tvsystem.pulse_matches_theta", pulse.value(), 1e-10, pulse.witness());

             std::vector<CVector> inputs;
             for (const StageColligation& stage : spec.stages) {
               inputs.push_back(raw_inputs[static_cast<std::size_t>(stage.k)].head(stage.u()));
             }
             r.merge(energy_audit(spec, x0, inputs, N));
             r.merge(weighted_colligation_audit(spec, fam.grams));
             return r;
           }),
           tag_of("pair", i) + " (" + describe_pair(pairs[i]) + ")");
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 6

Report criterion_classical_collapse(std::uint64_t seed) {
  Report agg;
  const std::vector<GridPoint> grid = default_grid();
  RandomPairRanges ranges;
  ranges.max_n = 1;
  const std::vector<OutputPair> pairs = random_pairs(seed + 6, 10, ranges);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    absorb(agg, guarded("collapse", [&] {
             Report r;
             const InnerFamily fam = build_inner_family(pairs[i], 4, 32);
             MaxResidual gap;
             for (const GridPoint& pt : grid) {
               const CMatrix t0 = theta_stage(fam.pair, fam.stages[0], pt.z) *
                                  theta_stage(fam.pair, fam.stages[0], pt.zeta).adjoint();
               for (std::size_t k = 1; k < fam.stages.size(); ++k) {
                 const CMatrix tk = theta_stage(fam.pair, fam.stages[k], pt.z) *
                                    theta_stage(fam.pair, fam.stages[k], pt.zeta).adjoint();
                 gap.observe_lazy((tk - t0).norm(), [&] {
                   return "k=" + std::to_string(k) + " " + format_point(pt);
                 });
               }
             }
             r.add("collapse.theta_k_independent", gap.value(), 1e-9, gap.witness());
             const Approach1Result a1 = approach1_build(pairs[i], {GridPoint{0.3, 0.5}}, 16);
             r.add_flag("collapse.single_multiplier", a1.family.F.size() == 1);
             return r;
           }),
           tag_of("pair", i) + " (" + describe_pair(pairs[i]) + ")");
  }
  return agg;
}

Report criterion_boundary_modulus(std::uint64_t seed) {
  Report agg;
  std::vector<OutputPair> pairs;
  for (Complex alpha : {Complex(0.5, 0.0), Complex(0.3, 0.0), Complex(0.0, 0.7)}) {
    const OneZeroOracle o = oracle_all({alpha, 1}, 0);
    pairs.emplace_back(CMatrix::Constant(1, 1, o.A()), CMatrix::Constant(1, 1, Complex(o.C())), 1);
  }
  RandomPairRanges ranges;
  ranges.max_n = 1;
  ranges.max_p = 1;
  for (const OutputPair& p : random_pairs(seed + 66, 5, ranges)) pairs.push_back(p);

  constexpr double kRadius = 0.999;
  constexpr int kPhases = 64;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    absorb(agg, guarded("boundary", [&] {
             const OutputPair& pair = pairs[i];
             GramianOptions opts;
             opts.k_max = 1;
             const GramianSet g = gramians(pair, opts);
             const StageColligation stage = inner_stage(pair, g, 0);
             const CMatrix G_inv = hermitian_inverse(g.G(1));
             MaxResidual modulus;
             MaxResidual explained;
             for (int m = 0; m < kPhases; ++m) {
               const Complex z = std::polar(kRadius, 2.0 * std::numbers::pi * m / kPhases);
               const CMatrix I = CMatrix::Identity(pair.d(), pair.d());
               const CMatrix R = solve_linear(CMatrix(I - z * pair.A), I);
               const Complex theta = (stage.D + z * pair.C * R * stage.B)(0, 0);
               const Complex kernel = (pair.C * R * G_inv * R.adjoint() * pair.C.adjoint())(0, 0);
               const std::string where = "z=" + std::to_string(z.real()) + "," +
                                         std::to_string(z.imag());
               modulus.observe(std::abs(std::abs(theta) - 1.0), where);
               explained.observe(std::abs((1.0 - std::norm(theta)) -
                                          (1.0 - std::norm(z)) * kernel.real()),
                                 where);
             }
             Report r;
             r.add("collapse.boundary_modulus", modulus.value(), 1e-3, modulus.witness());
             r.add("collapse.boundary_defect_matches_kernel", explained.value(), 1e-9,
                   explained.witness());
             return r;
           }),
           tag_of("scalar pair", i) + " (" + describe_pair(pairs[i]) + ")");
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 7

Report criterion_stein_dichotomy() {
  Report agg;
  {
    const SteinUniquenessReport r =
        stein_uniqueness_probe(OutputPair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 1.0), 1));
    agg.add_flag("stein.contraction_unique", r.converged && r.unique);
    agg.add("stein.unique_solution_is_gramian",
            std::abs(r.gramian(0, 0) - Complex(1.0 / 0.75)) + r.gramian_residual, 1e-10);
  }
  {
    const SteinUniquenessReport r =
        stein_uniqueness_probe(OutputPair(CMatrix::Constant(1, 1, 1.0), CMatrix::Zero(1, 1), 1));
    agg.add_flag("stein.unitary_scalar_nonunique",
                 r.converged && !r.unique && r.second_solution.has_value());
    agg.add("stein.unitary_scalar_second_solution",
            r.second_residual + std::abs(r.delta(0, 0) - 1.0), 1e-10);
  }
  {
    CMatrix A = CMatrix::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 0.5;
    CMatrix C = CMatrix::Zero(1, 2);
    C(0, 1) = 1.0;
    const SteinUniquenessReport r = stein_uniqueness_probe(OutputPair(A, C, 1));
    CMatrix expected_delta = CMatrix::Zero(2, 2);
    expected_delta(0, 0) = 1.0;
    agg.add_flag("stein.diagonal_nonunique",
                 r.converged && !r.unique && r.second_solution.has_value());
    agg.add("stein.diagonal_second_solution",
            r.second_residual + (r.delta - expected_delta).norm(), 1e-10);
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Criterion 8

Report criterion_squeeze(std::uint64_t seed) {
  constexpr int kInstances = 500;
  constexpr int kMaxDraws = 50000;
  std::mt19937_64 rng(seed + 8);
  std::uniform_int_distribution<int> dist_n(3, 5);
  std::uniform_int_distribution<int> dist_d(1, 4);
  std::uniform_real_distribution<double> dist_norm(0.2, 1.0);
  int accepted = 0;
  int draws = 0;
  MaxResidual worst;
  while (accepted < kInstances && draws < kMaxDraws) {
    ++draws;
    const int n = dist_n(rng);
    const int d = dist_d(rng);
    const CMatrix X = random_complex_matrix(rng, d, d);
    const CMatrix H = X * X.adjoint() + 0.1 * CMatrix::Identity(d, d);
    CMatrix K = random_complex_matrix(rng, d, d);
    K *= dist_norm(rng) / std::max(spectral_norm(K), 1e-12);
    // A is a contraction in the H metric.
    const CMatrix A = hermitian_inv_sqrt(H) * K * hermitian_sqrt(H);
    try {
      const SqueezeReport r = squeeze_check(A, H, n);
      ++accepted;
      const double h = hermitian_norm(H);
      for (double lo : r.min_eigenvalues) {
        worst.observe_lazy(-lo / h, [&] {
          return "instance " + std::to_string(accepted) + " n=" + std::to_string(n);
        });
      }
    } catch (const PreconditionError&) {
      continue;
    }
  }
  Report r;
  r.add_flag("squeeze.instances_generated", accepted == kInstances,
             std::to_string(accepted) + " accepted from " + std::to_string(draws) + " draws");
  r.add("squeeze.intermediate_positivity", std::max(0.0, worst.value()), 1e-9, worst.witness());
  return r;
}

// ---------------------------------------------------------------------------
// Module invariants

Report invariants_corelinalg(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 100);
  std::uniform_int_distribution<int> dist_d(1, 6);
  MaxResidual recon;
  for (int i = 0; i < 200; ++i) {
    const int d = dist_d(rng);
    std::uniform_int_distribution<int> dist_r(1, d);
    const int rank = dist_r(rng);
    const CMatrix X = random_complex_matrix(rng, d, rank);
    const CMatrix M = X * X.adjoint();
    const CMatrix F = psd_factor(M);
    recon.observe_lazy((F * F.adjoint() - M).norm() / M.norm(),
                       [&] { return "instance " + std::to_string(i); });
  }
  MaxResidual similarity;
  for (int i = 0; i < 100; ++i) {
    const int d = dist_d(rng);
    const CMatrix M = random_complex_matrix(rng, d, d);
    const CMatrix T = CMatrix::Identity(d, d) + 0.3 * random_complex_matrix(rng, d, d);
    const CMatrix Tinv = solve_linear(T, CMatrix::Identity(d, d));
    const double r0 = spectral_radius(M);
    similarity.observe_lazy(std::abs(spectral_radius(CMatrix(T * M * Tinv)) - r0) / std::max(1.0, r0),
                            [&] { return "instance " + std::to_string(i); });
  }
  Report r;
  r.add("core.psd_factor_reconstruction", recon.value(), 1e-10, recon.witness());
  r.add("core.spectral_radius_similarity", similarity.value(), 1e-8, similarity.witness());
  return r;
}

Report invariants_bergman(std::uint64_t seed) {
  Report agg;
  std::mt19937_64 rng(seed + 200);

  // Alternating sum of adjoint-shift norms.
  MaxResidual ladder;
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const BergmanElement f(n, random_complex_matrix(rng, 2, 61));
      double acc = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binomial_value(n, j) * bergman_norm_squared(shift_adjoint_power(f, j));
      }
      const double f0 = f.coeffs.col(0).squaredNorm();
      ladder.observe_lazy(std::abs(acc - f0) / bergman_norm_squared(f),
                          [&] { return "n=" + std::to_string(n); });
    }
  }
  agg.add("bergman.isometry_ladder", ladder.value(), 1e-10, ladder.witness());

  // Gramian of order n - 1 of the model pair decays like (n-1)/(n+j-1).
  {
    constexpr int kN = 120;
    MaxResidual diag;
    bool tail_small = true;
    for (int n = 2; n <= 3; ++n) {
      const OutputPair model = model_pair(n, 1, kN);
      const CMatrix G = gramian_series(model.A, model.C, n - 1, 0, kN + 1);
      for (int j = 0; j <= kN; ++j) {
        const double expected = static_cast<double>(n - 1) / static_cast<double>(n + j - 1);
        diag.observe_lazy(std::abs(G(j, j) - expected),
                          [&] { return "n=" + std::to_string(n) + " j=" + std::to_string(j); });
      }
      tail_small = tail_small && G(kN, kN).real() < 2.0 * (n - 1) / kN;
    }
    agg.add("bergman.lower_gramian_diagonal", diag.value(), 1e-10, diag.witness());
    agg.add_flag("bergman.lower_gramian_not_bounded_below", tail_small);
  }

  // Shifted gramians of the model pair dominate the identity.
  {
    constexpr int kN = 40;
    MaxResidual below;
    MaxResidual entries;
    for (int n = 1; n <= 3; ++n) {
      const OutputPair model = model_pair(n, 1, kN);
      for (int k = 0; k <= 3; ++k) {
        const CMatrix G = gramian_series(model.A, model.C, n, k, kN + 1);
        below.observe_lazy(std::max(0.0, 1.0 - min_eigenvalue(G)), [&] {
          return "n=" + std::to_string(n) + " k=" + std::to_string(k);
        });
        for (int j = 0; j <= kN; ++j) {
          const double expected = model_shifted_gramian_diag(n, k, j).convert_to<double>();
          entries.observe_lazy(std::abs(G(j, j) - expected) / expected, [&] {
            return "n=" + std::to_string(n) + " k=" + std::to_string(k) + " j=" + std::to_string(j);
          });
        }
      }
    }
    agg.add("bergman.model_shifted_gramian_ge_identity", below.value(), 1e-10, below.witness());
    agg.add("bergman.model_shifted_gramian_diagonal", entries.value(), 1e-10, entries.witness());
  }

  // Hermitian symmetry of every kernel kind.
  {
    RandomPairRanges ranges;
    ranges.max_d = 3;
    const std::vector<OutputPair> pairs = random_pairs(seed + 201, 4, ranges);
    const std::vector<GridPoint> grid = default_grid();
    MaxResidual sym;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      GramianOptions opts;
      opts.k_max = 3;
      const GramianSet g = gramians(pairs[i], opts);
      const CMatrix H = CMatrix::Identity(pairs[i].d(), pairs[i].d());
      for (KernelKind kind : {KernelKind::kObservability, KernelKind::kSubspace,
                              KernelKind::kShiftedRange, KernelKind::kShiftedSubspace,
                              KernelKind::kDifference, KernelKind::kWandering}) {
        const KernelGrid kg = kernel_eval(kind, pairs[i], g, &H, 2, grid);
        double scale = 1.0;
        for (const auto& v : kg.values) scale = std::max(scale, v.norm());
        sym.observe_lazy(hermitian_symmetry_defect(kg) / scale, [&] {
          return tag_of("pair", i) + " " + to_string(kind);
        });
      }
    }
    agg.add("bergman.kernel_hermitian_symmetry", sym.value(), 1e-10, sym.witness());
  }

  for (int n = 1; n <= 4; ++n) {
    absorb(agg, guarded("bergman", [&] { return cauchy_dual_checks(n, 4, 64, seed + 202); }),
           "n=" + std::to_string(n));
  }
  {
    const OutputPair onezero(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
    absorb(agg, guarded("bergman", [&] { return smperp_decomposition_check(onezero, 1, 64); }),
           "one-zero n=2 k=1");
    RandomPairRanges ranges;
    ranges.max_d = 3;
    const std::vector<OutputPair> pairs = random_pairs(seed + 203, 3, ranges);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      absorb(agg, guarded("bergman", [&] { return smperp_decomposition_check(pairs[i], 2, 64); }),
             tag_of("pair", i) + " k=2");
    }
  }
  return agg;
}

Report invariants_beurlinglax(std::uint64_t seed, int N) {
  Report agg;
  const std::vector<GridPoint> grid = default_grid();
  RandomPairRanges ranges;
  ranges.max_d = 3;
  const std::vector<OutputPair> pairs = random_pairs(seed + 300, 8, ranges);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string tag = tag_of("pair", i) + " (" + describe_pair(pairs[i]) + ")";
    absorb(agg, guarded("approach1", [&] { return approach1_build(pairs[i], grid, N).report; }), tag);
    absorb(agg, guarded("approach4", [&] { return approach4_build(pairs[i], grid, N).report; }), tag);
  }

  constexpr int kN = 128;
  TaylorTable identity;
  identity.coeffs.push_back(CMatrix::Identity(2, 2));
  for (int j = 1; j <= kN; ++j) identity.coeffs.push_back(CMatrix::Zero(2, 2));
  absorb(agg, approach2_predicate(identity, 2, kN), "identity");
  TaylorTable doubled = identity;
  doubled.coeffs[0] *= 2.0;
  const Report doubled_report = approach2_predicate(doubled, 2, kN);
  agg.add_flag("approach2.detects_noncontractive", !doubled_report.all_pass());
  absorb(agg, approach2_onezero_instance(Complex(0.5, 0.0), 2, kN), "alpha=0.5 n=2");
  absorb(agg, approach2_onezero_instance(Complex(0.0, 0.7), 3, kN), "alpha=0.7i n=3");
  return agg;
}

Report invariants_tvsystem(std::uint64_t seed) {
  Report r;
  std::mt19937_64 rng(seed + 400);
  std::uniform_int_distribution<int> dist_T(0, 30);
  MaxResidual closed;
  MaxResidual linear;
  for (int i = 0; i < 100; ++i) {
    const int T = dist_T(rng);
    const SystemSpec spec = random_system(rng, T);
    const CVector x0 = random_vector(rng, spec.pair.d());
    const std::vector<CVector> u = random_inputs(rng, spec, T + 1);
    const std::vector<CVector> v = random_inputs(rng, spec, T + 1);
    const SignalTrace sim = simulate(spec, x0, u, T);
    closed.observe_lazy(trace_difference(sim, closed_form_trace(spec, x0, u, T)),
                        [&] { return "instance " + std::to_string(i) + " T=" + std::to_string(T); });
    std::vector<CVector> sum;
    for (std::size_t j = 0; j < u.size(); ++j) sum.push_back(u[j] + v[j]);
    const CVector zero = CVector::Zero(spec.pair.d());
    const SignalTrace a = simulate(spec, zero, u, T);
    const SignalTrace b = simulate(spec, zero, v, T);
    const SignalTrace ab = simulate(spec, zero, sum, T);
    SignalTrace added = a;
    for (std::size_t j = 0; j < added.states.size(); ++j) added.states[j] += b.states[j];
    for (std::size_t j = 0; j < added.outputs.size(); ++j) added.outputs[j] += b.outputs[j];
    linear.observe_lazy(trace_difference(ab, added),
                        [&] { return "instance " + std::to_string(i); });
  }
  r.add("tvsystem.closed_form_trajectory", closed.value(), 1e-10, closed.witness());
  r.add("tvsystem.superposition", linear.value(), 1e-10, linear.witness());

  // n = 1 with constant stages is the time-invariant recursion.
  {
    SystemSpec spec = random_system(rng, 0);
    spec.pair.n = 1;
    const StageColligation base = spec.stages[0];
    constexpr int kT = 30;
    spec.stages.clear();
    for (int k = 0; k <= kT; ++k) {
      StageColligation s = base;
      s.k = k;
      spec.stages.push_back(s);
    }
    const CVector x0 = random_vector(rng, spec.pair.d());
    const std::vector<CVector> u = random_inputs(rng, spec, kT + 1);
    const SignalTrace sim = simulate(spec, x0, u, kT);
    CVector x = x0;
    double gap = 0.0;
    for (int j = 0; j <= kT; ++j) {
      const CVector y = spec.pair.C * x + base.D * u[static_cast<std::size_t>(j)];
      gap = std::max(gap, (y - sim.outputs[static_cast<std::size_t>(j)]).norm());
      x = spec.pair.A * x + base.B * u[static_cast<std::size_t>(j)];
    }
    r.add("tvsystem.classical_recursion", gap, 0.0);
  }

  // Z-transform reconciliation: pulses and a mixed input.
  {
    RandomPairRanges ranges;
    ranges.max_d = 3;
    const std::vector<OutputPair> pairs = random_pairs(seed + 401, 4, ranges);
    Report recon;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      absorb(recon, guarded("tvsystem", [&] {
               const InnerFamily fam = build_inner_family(pairs[i], 4, 64);
               const SystemSpec spec = system_from_family(fam);
               const CVector x0 = random_vector(rng, spec.pair.d());
               const std::vector<CVector> u = random_inputs(rng, spec, 5);
               return ztransform_reconcile(spec, x0, u, 64);
             }),
             tag_of("pair", i));
    }
    r.merge(recon);
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::string> verify_all_checklist() {
  return {
      "corelinalg: psd_factor reconstructs random PSD matrices -> core.psd_factor_reconstruction",
      "corelinalg: spectral radius is similarity invariant -> core.spectral_radius_similarity",
      "serieskernels: Chu-Vandermonde identity -> series.chu_vandermonde",
      "serieskernels: truncated Bergman series -> series.truncated_sum",
      "serieskernels: shift recursion and combination -> series.shift_recursion, series.combination",
      "serieskernels: closed form equals shifted difference -> series.closed_form_vs_difference",
      "serieskernels: n=1 collapse -> series.n1_coefficients_are_one, series.n1_szego_collapse",
      "serieskernels: mu times binomial is one -> series.mu_times_binomial_exact",
      "statespace: Stein recursion matches series -> gramian.stein_vs_series",
      "statespace: shifted gramian closed form matches series -> gramian.shifted_closed_vs_series",
      "statespace: gamma ladder -> gramian.gamma_ladder",
      "statespace: weighted Stein identity -> gramian.weighted_stein",
      "statespace: gramian is the minimal solution -> gramian.minimality",
      "statespace: similarity congruence -> gramian.similarity_congruence",
      "statespace: Stein uniqueness dichotomy -> stein.*",
      "statespace: squeeze lemma -> squeeze.*",
      "bergman: isometry ladder -> bergman.isometry_ladder",
      "bergman: lower gramian of the model pair is not bounded below -> bergman.lower_gramian_*",
      "bergman: model shifted gramians dominate the identity -> bergman.model_shifted_gramian_*",
      "bergman: kernels are Hermitian -> bergman.kernel_hermitian_symmetry",
      "bergman: shift, adjoint and Cauchy dual relations -> bergman.adjoint_*, bergman.cauchy_dual_raises_shift",
      "bergman: orthocomplement decomposition -> bergman.shifted_orthocomplement_gap",
      "beurlinglax: sum-of-kernels factorization -> approach1.*",
      "beurlinglax: inner family orthonormality and kernel identities -> inner.*",
      "beurlinglax: difference kernel factorization -> inner.difference_kernel_factorization",
      "beurlinglax: n=1 collapse -> collapse.theta_k_independent, collapse.single_multiplier",
      "beurlinglax: contractive multiplier predicate -> approach2.*",
      "beurlinglax: wandering subspace construction -> approach4.*",
      "onezero_oracle: closed forms match the pipelines -> onezero.*",
      "onezero_oracle: both shifted-gramian forms agree -> onezero.oracle.shifted_forms_*",
      "onezero_oracle: theta vanishes at alpha -> onezero.oracle.theta_vanishes_at_alpha",
      "onezero_oracle: sum kernel with closed-form multipliers -> onezero.oracle.sum_kernel",
      "tvsystem: simulation matches closed-form trajectory -> tvsystem.closed_form_trajectory",
      "tvsystem: superposition -> tvsystem.superposition",
      "tvsystem: n=1 classical recursion -> tvsystem.classical_recursion",
      "tvsystem: pulse responses match theta coefficients -> tvsystem.pulse_matches_theta",
      "tvsystem: Z-transform reconciliation -> tvsystem.ztransform",
      "tvsystem: energy balance -> tvsystem.energy_balance, tvsystem.energy_orthogonality",
      "tvsystem: weighted colligations are unitary -> tvsystem.weighted_*, tvsystem.tweak_*",
  };
}

Report run_verify_all(const SuiteOptions& options) {
  const std::uint64_t seed = options.seed;
  const int N = options.N;
  std::vector<std::pair<std::string, std::function<Report()>>> tasks = {
      {"criterion_series", [] { return criterion_series(); }},
      {"criterion_gramians", [=] { return criterion_gramians(seed); }},
      {"criterion_onezero", [] { return criterion_onezero(); }},
      {"criterion_inner_family", [=] { return criterion_inner_family(seed, N); }},
      {"criterion_simulator", [=] { return criterion_simulator(seed, N); }},
      {"criterion_classical_collapse", [=] { return criterion_classical_collapse(seed); }},
      {"criterion_stein_dichotomy", [] { return criterion_stein_dichotomy(); }},
      {"criterion_squeeze", [=] { return criterion_squeeze(seed); }},
      {"invariants_corelinalg", [=] { return invariants_corelinalg(seed); }},
      {"invariants_bergman", [=] { return invariants_bergman(seed); }},
      {"invariants_beurlinglax", [=] { return invariants_beurlinglax(seed, N); }},
      {"invariants_tvsystem", [=] { return invariants_tvsystem(seed); }},
  };
  std::vector<Report> results(tasks.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  for (std::size_t start = 0; start < tasks.size(); start += jobs) {
    std::vector<std::future<Report>> running;
    const std::size_t stop = std::min(tasks.size(), start + jobs);
    for (std::size_t t = start; t < stop; ++t) {
      running.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                   [&tasks, t] { return guarded(tasks[t].first, tasks[t].second); }));
    }
    for (std::size_t t = start; t < stop; ++t) results[t] = running[t - start].get();
  }
  Report merged;
  for (const Report& r : results) merged.merge(r);
  merged.sort_by_name();
  return merged;
}

}  // namespace blax
