#include "blax/tvsystem.hpp"

#include <sstream>

#include "blax/bergman.hpp"
#include "blax/serieskernels.hpp"

namespace blax {
namespace {

struct Step {
  CVector next_state;
  CVector output;
};

// One step of the recursion at time j. stage may be null only for a zero
// input.
Step advance(const OutputPair& pair, const StageColligation* stage, int j,
             const CVector& x, const CVector& u) {
  const int n = pair.n;
  Step s;
  s.next_state = (static_cast<double>(j + n) / static_cast<double>(j + 1)) * (pair.A * x);
  s.output = pair.C * x;
  if (stage != nullptr && stage->u() > 0) {
    s.next_state += binomial_value(j + n, j + 1) * (stage->B * u);
    s.output += binomial_value(j + n - 1, j) * (stage->D * u);
  }
  return s;
}

std::string step_error(int j, const std::string& what) {
  return "step " + std::to_string(j) + ": " + what;
}

// Input at time j resolved against the stages: missing inputs are zero,
// inputs beyond the last stage must vanish.
CVector resolve_input(const SystemSpec& spec, const std::vector<CVector>& inputs, int j) {
  const bool given = j < static_cast<int>(inputs.size());
  if (j > spec.K()) {
    if (given && inputs[static_cast<std::size_t>(j)].size() > 0 &&
        !inputs[static_cast<std::size_t>(j)].isZero(0.0)) {
      throw DomainError(step_error(j, "nonzero input but no stage is defined"));
    }
    return CVector();
  }
  const Eigen::Index u = spec.stages[static_cast<std::size_t>(j)].u();
  if (!given) return CVector::Zero(u);
  const CVector& in = inputs[static_cast<std::size_t>(j)];
  if (in.size() != u) {
    throw DimensionError(step_error(j, "input has " + std::to_string(in.size()) +
                                           " entries, stage expects " + std::to_string(u)));
  }
  return in;
}

const StageColligation* stage_at(const SystemSpec& spec, int j) {
  return j <= spec.K() ? &spec.stages[static_cast<std::size_t>(j)] : nullptr;
}

void check_initial_state(const SystemSpec& spec, const CVector& x0) {
  if (x0.size() != spec.pair.d()) {
    throw DimensionError("initial state has " + std::to_string(x0.size()) +
                         " entries, expected " + std::to_string(spec.pair.d()));
  }
}

double relative_gap(const CVector& a, const CVector& b) {
  return (a - b).norm() / std::max({1.0, a.norm(), b.norm()});
}

BergmanElement shifted_product(const TaylorTable& theta, const CVector& u, int shift,
                               int N, int n, Eigen::Index p) {
  CMatrix coeffs = CMatrix::Zero(p, N + 1);
  for (int j = shift; j <= N; ++j) {
    coeffs.col(j) = theta.coeffs[static_cast<std::size_t>(j - shift)] * u;
  }
  return BergmanElement(n, std::move(coeffs));
}

// Summands of y_hat: the free response followed by one term per nonzero
// input, truncated at N.
std::vector<BergmanElement> yhat_terms(const SystemSpec& spec, const CVector& x0,
                                       const std::vector<CVector>& inputs, int N,
                                       std::vector<int>* labels) {
  std::vector<BergmanElement> terms;
  terms.push_back(observability_apply(spec.pair, 0, x0, N));
  if (labels) labels->push_back(-1);
  const int last = std::min<int>(static_cast<int>(inputs.size()) - 1, N);
  for (int k = 0; k <= last; ++k) {
    const CVector u = resolve_input(spec, inputs, k);
    if (u.size() == 0 || u.isZero(0.0)) continue;
    const StageColligation& stage = spec.stages[static_cast<std::size_t>(k)];
    const TaylorTable theta = theta_taylor(spec.pair, stage, N - k);
    terms.push_back(shifted_product(theta, u, k, N, spec.n(), spec.pair.p()));
    if (labels) labels->push_back(k);
  }
  return terms;
}

}  // namespace

void SystemSpec::validate() const {
  pair.validate();
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const StageColligation& s = stages[k];
    if (s.k != static_cast<int>(k)) {
      throw DomainError("SystemSpec: stage " + std::to_string(k) + " carries index " +
                        std::to_string(s.k));
    }
    if (s.B.rows() != pair.d() || s.D.rows() != pair.p() || s.B.cols() != s.D.cols()) {
      throw DimensionError("SystemSpec: stage " + std::to_string(k) + " has inconsistent shapes");
    }
  }
}

SystemSpec system_from_family(const InnerFamily& fam) {
  SystemSpec spec;
  spec.pair = fam.pair;
  spec.stages = fam.stages;
  return spec;
}

SignalTrace simulate(const SystemSpec& spec, const CVector& x0,
                     const std::vector<CVector>& inputs, int T) {
  spec.validate();
  check_initial_state(spec, x0);
  if (T < 0) throw DomainError("simulate: T must be >= 0");
  SignalTrace trace;
  trace.states.push_back(x0);
  for (int j = 0; j <= T; ++j) {
    const CVector u = resolve_input(spec, inputs, j);
    const Step s = advance(spec.pair, stage_at(spec, j), j, trace.states.back(), u);
    trace.inputs.push_back(u);
    trace.outputs.push_back(s.output);
    trace.states.push_back(s.next_state);
  }
  return trace;
}

SignalTrace closed_form_trace(const SystemSpec& spec, const CVector& x0,
                              const std::vector<CVector>& inputs, int T) {
  spec.validate();
  check_initial_state(spec, x0);
  if (T < 0) throw DomainError("closed_form_trace: T must be >= 0");
  const OutputPair& pair = spec.pair;
  const int n = spec.n();

  std::vector<CVector> u;
  for (int j = 0; j <= T; ++j) u.push_back(resolve_input(spec, inputs, j));
  // A^m x0 and A^m B_l u(l) for every power needed.
  std::vector<CMatrix> powers{CMatrix::Identity(pair.d(), pair.d())};
  for (int m = 1; m <= T + 1; ++m) powers.push_back(powers.back() * pair.A);

  auto free_plus_forced = [&](int j) {
    CVector acc = powers[static_cast<std::size_t>(j)] * x0;
    for (int l = 0; l < j; ++l) {
      const CVector& ul = u[static_cast<std::size_t>(l)];
      if (ul.size() == 0) continue;
      acc += powers[static_cast<std::size_t>(j - l - 1)] *
             (spec.stages[static_cast<std::size_t>(l)].B * ul);
    }
    return acc;
  };

  SignalTrace trace;
  trace.inputs = u;
  for (int j = 0; j <= T + 1; ++j) {
    trace.states.push_back(binomial_value(n + j - 1, j) * free_plus_forced(j));
  }
  for (int j = 0; j <= T; ++j) {
    CVector inner = pair.C * free_plus_forced(j);
    const CVector& uj = u[static_cast<std::size_t>(j)];
    if (uj.size() > 0) inner += spec.stages[static_cast<std::size_t>(j)].D * uj;
    trace.outputs.push_back(binomial_value(n + j - 1, j) * inner);
  }
  return trace;
}

double trace_difference(const SignalTrace& a, const SignalTrace& b) {
  if (a.states.size() != b.states.size() || a.outputs.size() != b.outputs.size()) {
    throw DimensionError("trace_difference: traces have different lengths");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < a.states.size(); ++j) {
    worst = std::max(worst, relative_gap(a.states[j], b.states[j]));
  }
  for (std::size_t j = 0; j < a.outputs.size(); ++j) {
    worst = std::max(worst, relative_gap(a.outputs[j], b.outputs[j]));
  }
  return worst;
}

Report ztransform_reconcile(const SystemSpec& spec, const CVector& x0,
                            const std::vector<CVector>& inputs, int N) {
  constexpr double kTol = 1e-10;
  const SignalTrace trace = simulate(spec, x0, inputs, N);
  const std::vector<BergmanElement> terms = yhat_terms(spec, x0, inputs, N, nullptr);
  CMatrix yhat = CMatrix::Zero(spec.pair.p(), N + 1);
  for (const auto& t : terms) yhat += t.coeffs;

  MaxResidual worst;
  int first_bad = -1;
  for (int j = 0; j <= N; ++j) {
    const double r = relative_gap(trace.outputs[static_cast<std::size_t>(j)], yhat.col(j));
    if (first_bad < 0 && !(r <= kTol)) first_bad = j;
    worst.observe_lazy(r, [&] { return "j=" + std::to_string(j); });
  }
  Report report;
  report.add("tvsystem.ztransform", worst.value(), kTol,
             first_bad >= 0 ? "first offending j=" + std::to_string(first_bad)
                            : worst.witness());
  return report;
}

Report energy_audit(const SystemSpec& spec, const CVector& x0,
                    const std::vector<CVector>& inputs, int N) {
  spec.validate();
  check_initial_state(spec, x0);
  std::vector<int> labels;
  const std::vector<BergmanElement> terms = yhat_terms(spec, x0, inputs, N, &labels);

  GramianOptions opts;
  opts.series_terms = std::max<int>(200, static_cast<int>(spec.pair.d()) + 1);
  const GramianSet grams = gramians(spec.pair, opts);
  double expected = x0.dot(grams.G(spec.n()) * x0).real();
  for (int k = 0; k < static_cast<int>(inputs.size()) && k <= N; ++k) {
    expected += resolve_input(spec, inputs, k).squaredNorm();
  }

  BergmanElement yhat(spec.n(), CMatrix::Zero(spec.pair.p(), N + 1));
  for (const auto& t : terms) yhat.coeffs += t.coeffs;
  const double energy = bergman_norm_squared(yhat);

  MaxResidual orth;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const double na = std::sqrt(bergman_norm_squared(terms[a]));
    for (std::size_t b = a + 1; b < terms.size(); ++b) {
      const double nb = std::sqrt(bergman_norm_squared(terms[b]));
      const double scale = na * nb;
      const double r = scale > 0.0 ? std::abs(bergman_inner(terms[a], terms[b])) / scale : 0.0;
      orth.observe_lazy(r, [&] {
        return "terms " + std::to_string(labels[a]) + "," + std::to_string(labels[b]) +
               " (-1 is the free response)";
      });
    }
  }

  std::ostringstream os;
  os << "energy " << energy << " vs " << expected;
  Report report;
  report.add("tvsystem.energy_balance", std::abs(energy - expected) / std::max(1.0, expected),
             1e-8, os.str());
  report.add("tvsystem.energy_orthogonality", orth.value(), 1e-8, orth.witness());
  return report;
}

CMatrix colligation_isometry_defect(const OutputPair& pair, const StageColligation& stage,
                                    const GramianSet& grams) {
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const Eigen::Index u = stage.u();
  const double b = binomial_value(pair.n + stage.k - 1, stage.k);
  CMatrix U(d + p, d + u);
  U << pair.A, stage.B, pair.C, stage.D;
  const CMatrix out_metric =
      block_diag(grams.shifted_at(stage.k + 1), CMatrix(b * CMatrix::Identity(p, p)));
  const CMatrix in_metric = block_diag(grams.shifted_at(stage.k), CMatrix::Identity(u, u));
  return U.adjoint() * out_metric * U - in_metric;
}

CMatrix colligation_coisometry_defect(const OutputPair& pair, const StageColligation& stage,
                                      const GramianSet& grams) {
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const Eigen::Index u = stage.u();
  const double b = binomial_value(pair.n + stage.k - 1, stage.k);
  CMatrix U(d + p, d + u);
  U << pair.A, stage.B, pair.C, stage.D;
  const CMatrix in_inv = block_diag(hermitian_inverse(grams.shifted_at(stage.k)),
                                    CMatrix::Identity(u, u));
  const CMatrix out_inv = block_diag(hermitian_inverse(grams.shifted_at(stage.k + 1)),
                                     CMatrix(CMatrix::Identity(p, p) / b));
  return U * in_inv * U.adjoint() - out_inv;
}

CMatrix tweaked_colligation(const OutputPair& pair, const StageColligation& stage) {
  const int n = pair.n;
  const int k = stage.k;
  CMatrix out(pair.d() + pair.p(), pair.d() + stage.u());
  out << (static_cast<double>(k + n) / static_cast<double>(k + 1)) * pair.A,
      binomial_value(k + n, k + 1) * stage.B, pair.C,
      binomial_value(k + n - 1, k) * stage.D;
  return out;
}

Report weighted_colligation_audit(const SystemSpec& spec, const GramianSet& grams) {
  spec.validate();
  if (grams.k_max() < spec.K() + 1) {
    throw PreconditionError("weighted_colligation_audit: shifted gramians needed through k = " +
                            std::to_string(spec.K() + 1));
  }
  const OutputPair& pair = spec.pair;
  const int n = spec.n();
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();

  MaxResidual isometry;
  MaxResidual coisometry;
  MaxResidual rescaling;
  MaxResidual step;
  for (const StageColligation& stage : spec.stages) {
    const int k = stage.k;
    const Eigen::Index u = stage.u();
    const CMatrix iso = colligation_isometry_defect(pair, stage, grams);
    const double iso_scale = std::max(1.0, grams.shifted_at(k).norm());
    isometry.observe_lazy(iso.norm() / iso_scale, [&] { return "k=" + std::to_string(k); });
    const CMatrix co = colligation_coisometry_defect(pair, stage, grams);
    const double co_scale = std::max(1.0, hermitian_inverse(grams.shifted_at(k + 1)).norm());
    coisometry.observe_lazy(co.norm() / co_scale, [&] { return "k=" + std::to_string(k); });

    const CMatrix tweak = tweaked_colligation(pair, stage);
    CMatrix U(d + p, d + u);
    U << pair.A, stage.B, pair.C, stage.D;
    const CMatrix left = block_diag(
        CMatrix((static_cast<double>(k + n) / static_cast<double>(k + 1)) * CMatrix::Identity(d, d)),
        CMatrix::Identity(p, p));
    const CMatrix right = block_diag(
        CMatrix::Identity(d, d), CMatrix(binomial_value(k + n - 1, k) * CMatrix::Identity(u, u)));
    const CMatrix rescaled = left * U * right;
    rescaling.observe_lazy((tweak - rescaled).norm() / std::max(1.0, tweak.norm()),
                           [&] { return "k=" + std::to_string(k); });

    CVector x(d);
    for (Eigen::Index i = 0; i < d; ++i) x(i) = Complex(1.0 + 0.5 * static_cast<double>(i), -0.25);
    CVector in(u);
    for (Eigen::Index i = 0; i < u; ++i) in(i) = Complex(0.75, 0.5 * static_cast<double>(i));
    const Step s = advance(pair, &stage, k, x, in);
    CVector stacked(d + u);
    stacked << x, in;
    CVector expected(d + p);
    expected << s.next_state, s.output;
    step.observe_lazy(relative_gap(tweak * stacked, expected),
                      [&] { return "k=" + std::to_string(k); });
  }
  Report report;
  report.add("tvsystem.weighted_isometry", isometry.value(), 1e-9, isometry.witness());
  report.add("tvsystem.weighted_coisometry", coisometry.value(), 1e-9, coisometry.witness());
  report.add("tvsystem.tweak_is_rescaling", rescaling.value(), 1e-12, rescaling.witness());
  report.add("tvsystem.tweak_is_simulation_step", step.value(), 1e-12, step.witness());
  return report;
}

}  // namespace blax
