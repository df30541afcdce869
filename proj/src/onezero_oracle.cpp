#include "blax/onezero_oracle.hpp"

#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "blax/beurlinglax.hpp"
#include "blax/serieskernels.hpp"
#include "blax/statespace.hpp"

namespace blax {
namespace {

using HighPrecision = boost::multiprecision::cpp_bin_float_100;

// Binomial coefficient as a double. binom(m, 0) = 1 for every m, and zero
// when r < 0 or 0 <= m < r.
double binom(long m, long r) {
  if (r < 0) return 0.0;
  if (r == 0) return 1.0;
  if (m < 0) {
    const double v = binom(r - m - 1, r);
    return (r % 2 == 0) ? v : -v;
  }
  if (m < r) return 0.0;
  if (r > m - r) r = m - r;
  double out = 1.0;
  for (long i = 1; i <= r; ++i) out = out * static_cast<double>(m - r + i) / static_cast<double>(i);
  return std::round(out);
}

HighPrecision binom_hp(long m, long r) {
  HighPrecision out = 1;
  if (r > m - r) r = m - r;
  for (long i = 1; i <= r; ++i) {
    out *= (m - r + i);
    out /= i;
  }
  return out;
}

std::string describe(const OneZeroSpec& spec) {
  std::ostringstream os;
  os << "n=" << spec.n << " alpha=(" << spec.alpha.real() << "," << spec.alpha.imag() << ")";
  return os.str();
}

std::string describe_point(const OneZeroSpec& spec, int index, const GridPoint& pt) {
  return describe(spec) + " idx=" + std::to_string(index) + " " + format_point(pt);
}

double scalar_residual(Complex lhs, Complex rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

void OneZeroSpec::validate() const {
  const double r = std::abs(alpha);
  if (!(r > 1e-6 && r < 1.0 - 1e-6)) {
    std::ostringstream os;
    os << "OneZeroSpec: |alpha| = " << r << " must lie in (1e-6, 1 - 1e-6)";
    throw DomainError(os.str());
  }
  if (n < 1) throw DomainError("OneZeroSpec: n must be positive");
}

OneZeroOracle::OneZeroOracle(const OneZeroSpec& spec, int K) : spec_(spec), K_(K) {
  spec_.validate();
  if (K < 0) throw DomainError("oracle_all: K must be >= 0");
  const int n = spec_.n;
  const double a2 = std::norm(spec_.alpha);
  w_ = 1.0 - a2;
  c_ = std::pow(w_, 0.5 * n);

  for (int j = 0; j <= n; ++j) plain_.push_back(std::pow(w_, n - j));

  // Power-sum form, evaluated in extended precision: the prefactor
  // |alpha|^{-2k} amplifies cancellation inside the bracket.
  const HighPrecision a2_hp = a2;
  const HighPrecision wn_hp = boost::multiprecision::pow(HighPrecision(1) - a2_hp, n);
  for (int k = 0; k <= K + 1; ++k) {
    shifted_r_.push_back(std::pow(w_, n) * r_closed(k, a2).real());
    if (k == 0) {
      shifted_sum_.push_back(1.0);
      continue;
    }
    HighPrecision partial = 0;
    HighPrecision power = 1;
    for (int j = 0; j < k; ++j) {
      partial += binom_hp(n + j - 1, j) * power;
      power *= a2_hp;
    }
    const HighPrecision value = (HighPrecision(1) - wn_hp * partial) / power;
    shifted_sum_.push_back(value.convert_to<double>());
  }
  for (std::size_t k = 0; k < shifted_r_.size(); ++k) {
    discrepancy_ = std::max(discrepancy_, std::abs(shifted_r_[k] - shifted_sum_[k]) /
                                              std::abs(shifted_r_[k]));
  }

  const double abs_alpha = std::abs(spec_.alpha);
  const Complex phase = std::conj(spec_.alpha) / abs_alpha;
  for (int k = 0; k <= K; ++k) {
    const double gk = shifted_r_[static_cast<std::size_t>(k)];
    const double gk1 = shifted_r_[static_cast<std::size_t>(k + 1)];
    B_.push_back(-phase * c_ / std::sqrt(mu(k) * gk * gk1));
    D_.push_back(abs_alpha * std::sqrt(mu(k) * gk1 / gk));
  }
}

double OneZeroOracle::mu(int k) const { return 1.0 / binom(spec_.n + k - 1, k); }

Complex OneZeroOracle::blaschke(Complex z) const {
  return (z - spec_.alpha) / (1.0 - z * std::conj(spec_.alpha));
}

Complex OneZeroOracle::r_closed(int k, Complex x) const {
  const int n = spec_.n;
  const Complex inv = 1.0 / (1.0 - x);
  Complex out = 0.0;
  for (int l = 1; l <= n; ++l) {
    out += binom(l + k - 2, l - 1) * std::pow(inv, n + 1 - l);
  }
  return out;
}

Complex OneZeroOracle::r_series(int k, Complex x) const {
  if (!(std::abs(x) < 1.0)) throw DomainError("r_series: |x| must be below 1");
  const int n = spec_.n;
  Complex term = binom(n + k - 1, k);
  Complex sum = term;
  for (long j = 0; j < 100000000L; ++j) {
    term *= x * (static_cast<double>(n + j + k) / static_cast<double>(j + k + 1));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) && j > n + k) break;
  }
  return sum;
}

Complex OneZeroOracle::theta(int k, Complex z) const {
  const double a2 = std::norm(spec_.alpha);
  const double gk = shifted_r_.at(static_cast<std::size_t>(k));
  const double gk1 = shifted_r_.at(static_cast<std::size_t>(k + 1));
  const double scale = std::pow(w_, spec_.n) /
                       (std::abs(spec_.alpha) * std::sqrt(mu(k) * gk * gk1));
  return scale * (r_closed(k, a2) - r_closed(k, z * std::conj(spec_.alpha)));
}

Complex OneZeroOracle::theta_factored(int k, Complex z) const {
  const int n = spec_.n;
  const double gk = shifted_r_.at(static_cast<std::size_t>(k));
  const double gk1 = shifted_r_.at(static_cast<std::size_t>(k + 1));
  const Complex ratio = w_ / (1.0 - z * std::conj(spec_.alpha));
  Complex sum = 0.0;
  Complex ratio_power = 1.0;
  for (int j = 0; j < n; ++j) {
    double inner = 0.0;
    for (int l = 0; l <= n - j - 1; ++l) inner += binom(l + k - 1, l) * std::pow(w_, l);
    sum += inner * ratio_power;
    ratio_power *= ratio;
  }
  return -std::conj(spec_.alpha) * blaschke(z) * sum /
         (std::abs(spec_.alpha) * std::sqrt(mu(k) * gk * gk1));
}

Complex OneZeroOracle::theta0(Complex z) const {
  const Complex ratio = w_ / (1.0 - z * std::conj(spec_.alpha));
  Complex sum = 0.0;
  Complex ratio_power = 1.0;
  for (int j = 0; j < spec_.n; ++j) {
    sum += ratio_power;
    ratio_power *= ratio;
  }
  return -std::conj(spec_.alpha) * blaschke(z) * sum /
         std::sqrt(1.0 - std::pow(w_, spec_.n));
}

Complex OneZeroOracle::F(int l, Complex z) const {
  if (l < 1 || l > spec_.n) throw DomainError("OneZeroOracle::F: l out of range");
  const Complex factor = std::sqrt(w_) / (1.0 - z * std::conj(spec_.alpha));
  return blaschke(z) * std::pow(factor, spec_.n - l);
}

Complex OneZeroOracle::kM(Complex z, Complex zeta) const {
  const int n = spec_.n;
  const Complex a = spec_.alpha;
  return std::pow(1.0 - z * std::conj(zeta), -n) -
         std::pow(w_, n) / (std::pow(1.0 - z * std::conj(a), n) * std::pow(1.0 - a * std::conj(zeta), n));
}

Report OneZeroOracle::self_checks(const std::vector<GridPoint>& grid) const {
  const int n = spec_.n;
  Report report;
  report.add("onezero.oracle.shifted_forms_agree", discrepancy_, 1e-12, describe(spec_));

  MaxResidual r_forms;
  MaxResidual theta_forms;
  MaxResidual theta_zero;
  MaxResidual sumker;
  for (int k = 0; k <= K_; ++k) {
    const Complex at_alpha = theta(k, spec_.alpha);
    theta_zero.observe_lazy(std::abs(at_alpha), [&] { return describe(spec_) + " k=" + std::to_string(k); });
    for (Complex z : default_sample_points()) {
      const Complex x = z * std::conj(spec_.alpha);
      r_forms.observe_lazy(scalar_residual(r_closed(k, x), r_series(k, x)),
                           [&] { return describe(spec_) + " k=" + std::to_string(k); });
      theta_forms.observe_lazy(scalar_residual(theta(k, z), theta_factored(k, z)),
                               [&] { return describe(spec_) + " k=" + std::to_string(k); });
      if (k == 0) {
        theta_forms.observe_lazy(scalar_residual(theta(0, z), theta0(z)),
                                 [&] { return describe(spec_) + " k=0 geometric"; });
      }
    }
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& pt = grid[g];
    const Complex s = 1.0 - pt.z * std::conj(pt.zeta);
    Complex sum = 0.0;
    for (int l = 1; l <= n; ++l) sum += F(l, pt.z) * std::conj(F(l, pt.zeta)) / std::pow(s, l);
    sumker.observe_lazy(scalar_residual(kM(pt.z, pt.zeta), sum),
                        [&] { return describe_point(spec_, static_cast<int>(g), pt); });
  }
  report.add("onezero.oracle.resolvent_forms_agree", r_forms.value(), 1e-12, r_forms.witness());
  report.add("onezero.oracle.theta_forms_agree", theta_forms.value(), 1e-12, theta_forms.witness());
  report.add("onezero.oracle.theta_vanishes_at_alpha", theta_zero.value(), 1e-12, theta_zero.witness());
  report.add("onezero.oracle.sum_kernel", sumker.value(), 1e-12, sumker.witness());
  return report;
}

OneZeroOracle oracle_all(const OneZeroSpec& spec, int K) { return OneZeroOracle(spec, K); }

Report oracle_vs_pipeline(const OneZeroSpec& spec, int K,
                          const std::vector<GridPoint>& grid, int N) {
  const OneZeroOracle oracle(spec, K);
  const int n = spec.n;
  const OutputPair pair(CMatrix::Constant(1, 1, oracle.A()),
                        CMatrix::Constant(1, 1, Complex(oracle.C())), n);

  Report report = oracle.self_checks(grid);

  GramianOptions opts;
  opts.k_max = K + 1;
  const GramianSet grams = gramians(pair, opts);
  MaxResidual gram_res;
  for (int j = 0; j <= n; ++j) {
    const double expected = oracle.plain()[static_cast<std::size_t>(j)];
    gram_res.observe_lazy(std::abs(grams.G(j)(0, 0) - expected) / expected,
                          [&] { return describe(spec) + " G_" + std::to_string(j); });
  }
  for (int k = 0; k <= K + 1; ++k) {
    const double expected = oracle.shifted()[static_cast<std::size_t>(k)];
    gram_res.observe_lazy(std::abs(grams.shifted_at(k)(0, 0) - expected) / expected,
                          [&] { return describe(spec) + " shifted k=" + std::to_string(k); });
  }
  report.add("onezero.gramians", gram_res.value(), 1e-12, gram_res.witness());

  const InnerFamily fam = build_inner_family(pair, K, N);
  MaxResidual stage_res;
  MaxResidual theta_res;
  for (int k = 0; k <= K; ++k) {
    const StageColligation& stage = fam.stages[static_cast<std::size_t>(k)];
    if (stage.u() != 1) {
      report.add_flag("onezero.stage_dimension", false,
                      describe(spec) + " k=" + std::to_string(k) + " u=" + std::to_string(stage.u()));
      return report;
    }
    stage_res.observe_lazy(
        std::max(std::abs(std::abs(stage.B(0, 0)) - std::abs(oracle.B()[static_cast<std::size_t>(k)])),
                 std::abs(std::abs(stage.D(0, 0)) - oracle.D()[static_cast<std::size_t>(k)])),
        [&] { return describe(spec) + " k=" + std::to_string(k); });
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const GridPoint& pt = grid[g];
      const Complex lhs = theta_stage(pair, stage, pt.z)(0, 0) *
                          std::conj(theta_stage(pair, stage, pt.zeta)(0, 0));
      const Complex rhs = oracle.theta(k, pt.z) * std::conj(oracle.theta(k, pt.zeta));
      theta_res.observe_lazy(scalar_residual(lhs, rhs), [&] {
        return describe_point(spec, static_cast<int>(g), pt) + " k=" + std::to_string(k);
      });
    }
  }
  report.add("onezero.stage_magnitudes", stage_res.value(), 1e-10, stage_res.witness());
  report.add("onezero.theta_kernel", theta_res.value(), 1e-10, theta_res.witness());

  const Approach1Result a1 = approach1_build(pair, grid, N);
  const Approach4Result a4 = approach4_build(pair, grid, N);
  const KernelGrid kM = kernel_eval(KernelKind::kSubspace, pair, grams, nullptr, 0, grid);
  MaxResidual f_res;
  MaxResidual sumker_res;
  MaxResidual km_res;
  MaxResidual wandering_res;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& pt = grid[g];
    const Complex s = 1.0 - pt.z * std::conj(pt.zeta);
    Complex sum = 0.0;
    for (int l = 1; l <= n; ++l) {
      const Complex lhs = a1.family.f(l, pt.z)(0, 0) * std::conj(a1.family.f(l, pt.zeta)(0, 0));
      const Complex rhs = oracle.F(l, pt.z) * std::conj(oracle.F(l, pt.zeta));
      f_res.observe_lazy(scalar_residual(lhs, rhs), [&] {
        return describe_point(spec, static_cast<int>(g), pt) + " l=" + std::to_string(l);
      });
      sum += lhs / std::pow(s, l);
    }
    const Complex expected_km = oracle.kM(pt.z, pt.zeta);
    sumker_res.observe_lazy(scalar_residual(sum, expected_km),
                            [&] { return describe_point(spec, static_cast<int>(g), pt); });
    km_res.observe_lazy(scalar_residual(kM.values[g](0, 0), expected_km),
                        [&] { return describe_point(spec, static_cast<int>(g), pt); });
    const Complex w_lhs = approach4_evaluate(pair, a4.stage, pt.z)(0, 0) *
                          std::conj(approach4_evaluate(pair, a4.stage, pt.zeta)(0, 0));
    const Complex w_rhs = oracle.theta0(pt.z) * std::conj(oracle.theta0(pt.zeta));
    wandering_res.observe_lazy(scalar_residual(w_lhs, w_rhs),
                               [&] { return describe_point(spec, static_cast<int>(g), pt); });
  }
  report.add("onezero.multiplier_kernels", f_res.value(), 1e-10, f_res.witness());
  report.add("onezero.sum_kernel", sumker_res.value(), 1e-10, sumker_res.witness());
  report.add("onezero.subspace_kernel", km_res.value(), 1e-10, km_res.witness());
  report.add("onezero.wandering_theta", wandering_res.value(), 1e-10, wandering_res.witness());
  return report;
}

}  // namespace blax
