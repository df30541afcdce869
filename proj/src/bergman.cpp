#include "blax/bergman.hpp"

#include <array>
#include <map>
#include <sstream>

#include "blax/random_pairs.hpp"

namespace blax {
namespace {

// Ratio mu_{n,j+k} / mu_{n,j} as a double, computed exactly first.
double mu_ratio(int n, int j, int k) {
  return Rational(mu(n, j + k) / mu(n, j)).convert_to<double>();
}

double max_coeff_gap(const BergmanElement& f, const BergmanElement& g, int upto) {
  double worst = 0.0;
  for (int j = 0; j <= upto; ++j) {
    worst = std::max(worst, (f.coeffs.col(j) - g.coeffs.col(j)).norm());
  }
  return worst;
}

double max_coeff_norm(const BergmanElement& f, int upto) {
  double worst = 0.0;
  for (int j = 0; j <= upto; ++j) worst = std::max(worst, f.coeffs.col(j).norm());
  return worst;
}

BergmanElement shift_power(BergmanElement f, int k) {
  for (int i = 0; i < k; ++i) f = shift_apply(f);
  return f;
}

// Orthonormal-coordinate vectorization: block j is sqrt(mu_{n,j}) f_j.
CVector weighted_vec(const BergmanElement& f) {
  const Eigen::Index p = f.p();
  CVector v(p * (f.N() + 1));
  for (int j = 0; j <= f.N(); ++j) {
    v.segment(j * p, p) = std::sqrt(mu_value(f.n, j)) * f.coeffs.col(j);
  }
  return v;
}

// Memoizes R_{n,k}(zA) per distinct z; grids repeat each z many times.
class ResolventCache {
 public:
  ResolventCache(const CMatrix& A, int n, int k) : A_(A), n_(n), k_(k) {}
  const CMatrix& at(Complex z) {
    auto key = std::make_pair(z.real(), z.imag());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, shifted_resolvent(A_, n_, k_, z)).first->second;
  }

 private:
  const CMatrix& A_;
  int n_;
  int k_;
  std::map<std::pair<double, double>, CMatrix> cache_;
};

// sum_{j=1}^n (I - zA)^{-j}
CMatrix resolvent_power_sum(const CMatrix& A, int n, Complex z) {
  const CMatrix I = CMatrix::Identity(A.rows(), A.cols());
  const CMatrix R1 = solve_linear(CMatrix(I - z * A), I);
  CMatrix sum = CMatrix::Zero(A.rows(), A.cols());
  CMatrix power = I;
  for (int j = 1; j <= n; ++j) {
    power = power * R1;
    sum += power;
  }
  return sum;
}

}  // namespace

BergmanElement::BergmanElement(int n_in, CMatrix coeffs_in)
    : n(n_in), coeffs(std::move(coeffs_in)) {
  if (n < 1) throw DomainError("BergmanElement: n must be >= 1");
  if (coeffs.cols() < 1) throw DimensionError("BergmanElement: needs N >= 0");
}

Complex bergman_inner(const BergmanElement& f, const BergmanElement& g) {
  if (f.n != g.n || f.coeffs.rows() != g.coeffs.rows()) {
    throw DimensionError("bergman_inner: incompatible elements");
  }
  const int N = std::min(f.N(), g.N());
  Complex sum = 0.0;
  for (int j = 0; j <= N; ++j) {
    sum += mu_value(f.n, j) * g.coeffs.col(j).dot(f.coeffs.col(j));
  }
  return sum;
}

double bergman_norm_squared(const BergmanElement& f) {
  return bergman_inner(f, f).real();
}

BergmanElement shift_apply(const BergmanElement& f) {
  CMatrix out = CMatrix::Zero(f.coeffs.rows(), f.coeffs.cols());
  out.rightCols(f.coeffs.cols() - 1) = f.coeffs.leftCols(f.coeffs.cols() - 1);
  return BergmanElement(f.n, std::move(out));
}

BergmanElement shift_adjoint_apply(const BergmanElement& f) {
  CMatrix out = CMatrix::Zero(f.coeffs.rows(), f.coeffs.cols());
  for (int j = 0; j < f.N(); ++j) {
    out.col(j) = (static_cast<double>(j + 1) / (f.n + j)) * f.coeffs.col(j + 1);
  }
  return BergmanElement(f.n, std::move(out));
}

BergmanElement shift_adjoint_power(const BergmanElement& f, int k) {
  CMatrix out = CMatrix::Zero(f.coeffs.rows(), f.coeffs.cols());
  for (int j = 0; j + k <= f.N(); ++j) {
    out.col(j) = mu_ratio(f.n, j, k) * f.coeffs.col(j + k);
  }
  return BergmanElement(f.n, std::move(out));
}

BergmanElement observability_apply(const OutputPair& pair, int k,
                                   const CVector& x, int N) {
  pair.validate();
  if (x.size() != pair.d()) throw DimensionError("observability_apply: x has wrong size");
  if (k < 0 || N < 0) throw DomainError("observability_apply: k and N must be >= 0");
  if (!(spectral_radius(pair.A) < 1.0)) {
    throw StabilityError("observability_apply: spectral radius >= 1");
  }
  CMatrix coeffs(pair.p(), N + 1);
  CVector Ajx = x;
  for (int j = 0; j <= N; ++j) {
    coeffs.col(j) = binomial_value(pair.n + j + k - 1, j + k) * (pair.C * Ajx);
    Ajx = pair.A * Ajx;
  }
  return BergmanElement(pair.n, std::move(coeffs));
}

OutputPair model_pair(int n, int p, int N) {
  if (n < 1 || p < 1 || N < 0) throw DomainError("model_pair: invalid sizes");
  const Eigen::Index dim = static_cast<Eigen::Index>(p) * (N + 1);
  CMatrix A = CMatrix::Zero(dim, dim);
  for (int j = 0; j < N; ++j) {
    const double a = std::sqrt(mu_ratio(n, j, 1));
    for (int i = 0; i < p; ++i) A(j * p + i, (j + 1) * p + i) = a;
  }
  CMatrix C = CMatrix::Zero(p, dim);
  C.leftCols(p) = CMatrix::Identity(p, p);
  return OutputPair(std::move(A), std::move(C), n);
}

Rational model_shifted_gramian_diag(int n, int k, int j) {
  return mu(n, j) / mu(n, j + k);
}

Report cauchy_dual_checks(const OutputPair& pair, int k_max, int N) {
  pair.validate();
  if (N <= k_max + 1) throw DomainError("cauchy_dual_checks: needs N > k_max + 1");
  const int upto = N - k_max - 1;
  MaxResidual one_step;
  MaxResidual multi_step;
  MaxResidual dual;
  for (Eigen::Index i = 0; i < pair.d(); ++i) {
    const CVector x = CVector::Unit(pair.d(), i);
    std::vector<BergmanElement> phi;
    for (int k = 0; k <= k_max; ++k) {
      phi.push_back(shift_power(observability_apply(pair, k, x, N), k));
    }
    const BergmanElement plain = phi[0];
    for (int k = 1; k <= k_max; ++k) {
      const auto& ref = phi[static_cast<std::size_t>(k - 1)];
      const double scale = std::max(1e-300, max_coeff_norm(ref, upto));
      one_step.observe_lazy(
          max_coeff_gap(shift_adjoint_apply(phi[static_cast<std::size_t>(k)]), ref, upto) / scale,
          [&] { return "x=e" + std::to_string(i) + " k=" + std::to_string(k); });

      // Cauchy dual S (S*S)^{-1}: coefficient j is scaled by (j+n)/(j+1), then shifted.
      CMatrix scaled = ref.coeffs;
      for (int j = 0; j <= N; ++j) {
        scaled.col(j) *= static_cast<double>(j + pair.n) / (j + 1);
      }
      const BergmanElement lifted = shift_apply(BergmanElement(pair.n, scaled));
      const auto& target = phi[static_cast<std::size_t>(k)];
      dual.observe_lazy(
          max_coeff_gap(lifted, target, upto) / std::max(1e-300, max_coeff_norm(target, upto)),
          [&] { return "x=e" + std::to_string(i) + " k=" + std::to_string(k); });
    }
    for (int k = 0; k <= k_max; ++k) {
      for (int m = 1; m <= k_max; ++m) {
        const BergmanElement lhs = shift_adjoint_power(phi[static_cast<std::size_t>(k)], m);
        BergmanElement rhs;
        if (m < k) {
          rhs = phi[static_cast<std::size_t>(k - m)];
        } else {
          CVector y = x;
          for (int r = 0; r < m - k; ++r) y = pair.A * y;
          rhs = observability_apply(pair, 0, y, N);
        }
        multi_step.observe_lazy(
            max_coeff_gap(lhs, rhs, upto) / std::max(1e-300, max_coeff_norm(plain, upto)),
            [&] {
              return "x=e" + std::to_string(i) + " k=" + std::to_string(k) +
                     " m=" + std::to_string(m);
            });
      }
    }
  }
  Report report;
  report.add("bergman.adjoint_lowers_shift", one_step.value(), 1e-9, one_step.witness());
  report.add("bergman.adjoint_power_lowers_shift", multi_step.value(), 1e-9,
             multi_step.witness());
  report.add("bergman.cauchy_dual_raises_shift", dual.value(), 1e-9, dual.witness());
  return report;
}

Report cauchy_dual_checks(int n, int k_max, int N, std::uint64_t seed) {
  RandomPairRanges ranges;
  ranges.max_n = 1;
  std::vector<OutputPair> pairs = random_pairs(seed, 4, ranges);
  Report merged;
  std::map<std::string, Check> worst;
  for (auto& pair : pairs) {
    pair.n = n;
    const Report pair_report = cauchy_dual_checks(pair, k_max, N);
    for (const Check& c : pair_report.checks()) {
      auto it = worst.find(c.name);
      if (it == worst.end() || !(c.residual <= it->second.residual)) worst[c.name] = c;
    }
  }
  for (const auto& [name, c] : worst) merged.add(name, c.residual, c.tolerance, c.witness);
  return merged;
}

std::vector<GridPoint> default_grid() {
  const std::vector<Complex> pts = default_sample_points();
  std::vector<GridPoint> grid;
  grid.reserve(pts.size() * pts.size());
  for (Complex z : pts) {
    for (Complex zeta : pts) grid.push_back({z, zeta});
  }
  return grid;
}

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kObservability:
      return "observability";
    case KernelKind::kSubspace:
      return "subspace";
    case KernelKind::kShiftedRange:
      return "shifted_range";
    case KernelKind::kShiftedSubspace:
      return "shifted_subspace";
    case KernelKind::kDifference:
      return "difference";
    case KernelKind::kWandering:
      return "wandering";
  }
  return "unknown";
}

std::string format_point(const GridPoint& pt) {
  std::ostringstream os;
  os.precision(4);
  os << "z=(" << pt.z.real() << "," << pt.z.imag() << ") zeta=(" << pt.zeta.real()
     << "," << pt.zeta.imag() << ")";
  return os.str();
}

KernelGrid kernel_eval(KernelKind kind, const OutputPair& pair,
                       const GramianSet& grams, const CMatrix* H, int k,
                       const std::vector<GridPoint>& grid) {
  pair.validate();
  const int n = pair.n;
  const Eigen::Index p = pair.p();
  const CMatrix& A = pair.A;
  const CMatrix& C = pair.C;
  const CMatrix Ip = CMatrix::Identity(p, p);
  for (const auto& pt : grid) {
    if (!(std::abs(pt.z) < 1.0) || !(std::abs(pt.zeta) < 1.0)) {
      throw DomainError("kernel_eval: grid point outside the disk");
    }
  }
  if (k < 0) throw DomainError("kernel_eval: k must be >= 0");

  KernelGrid out;
  out.points = grid;
  out.values.reserve(grid.size());

  switch (kind) {
    case KernelKind::kObservability: {
      if (H == nullptr || H->rows() != pair.d() || H->cols() != pair.d()) {
        throw DimensionError("kernel_eval: observability kernel needs a d x d H");
      }
      ResolventCache R(A, n, 0);
      for (const auto& pt : grid) {
        out.values.push_back(C * R.at(pt.z) * (*H) * R.at(pt.zeta).adjoint() * C.adjoint());
      }
      break;
    }
    case KernelKind::kSubspace: {
      const CMatrix Ginv = checked_gramian_inverse(grams.G(n), "kernel_eval");
      ResolventCache R(A, n, 0);
      for (const auto& pt : grid) {
        const Complex s = Complex(1.0) - pt.z * std::conj(pt.zeta);
        out.values.push_back(Ip / ipow(s, n) -
                             C * R.at(pt.z) * Ginv * R.at(pt.zeta).adjoint() * C.adjoint());
      }
      break;
    }
    case KernelKind::kShiftedRange:
    case KernelKind::kShiftedSubspace: {
      const CMatrix Ginv = checked_gramian_inverse(grams.shifted_at(k), "kernel_eval");
      ResolventCache R(A, n, k);
      for (const auto& pt : grid) {
        const Complex zz = pt.z * std::conj(pt.zeta);
        CMatrix inner = C * R.at(pt.z) * Ginv * R.at(pt.zeta).adjoint() * C.adjoint();
        if (kind == KernelKind::kShiftedSubspace) {
          Complex scalar = 0.0;
          for (int l = 1; l <= n; ++l) {
            scalar += binomial_value(l + k - 2, l - 1) / ipow(Complex(1.0) - zz, n - l + 1);
          }
          inner = scalar * Ip - inner;
        }
        out.values.push_back(ipow(zz, k) * inner);
      }
      break;
    }
    case KernelKind::kDifference: {
      const CMatrix G0inv = checked_gramian_inverse(grams.shifted_at(k), "kernel_eval");
      const CMatrix G1inv = checked_gramian_inverse(grams.shifted_at(k + 1), "kernel_eval");
      ResolventCache R0(A, n, k);
      ResolventCache R1(A, n, k + 1);
      const double w = binomial_value(n + k - 1, k);
      for (const auto& pt : grid) {
        const Complex zz = pt.z * std::conj(pt.zeta);
        const CMatrix value =
            w * Ip - C * R0.at(pt.z) * G0inv * R0.at(pt.zeta).adjoint() * C.adjoint() +
            zz * (C * R1.at(pt.z) * G1inv * R1.at(pt.zeta).adjoint() * C.adjoint());
        out.values.push_back(ipow(zz, k) * value);
      }
      break;
    }
    case KernelKind::kWandering: {
      const CMatrix Ginv = checked_gramian_inverse(grams.G(n), "kernel_eval");
      const CMatrix G1inv = checked_gramian_inverse(grams.shifted_at(1), "kernel_eval");
      std::map<std::pair<double, double>, std::pair<CMatrix, CMatrix>> cache;
      auto terms = [&](Complex z) -> const std::pair<CMatrix, CMatrix>& {
        auto key = std::make_pair(z.real(), z.imag());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const CMatrix I = CMatrix::Identity(A.rows(), A.cols());
        CMatrix R1 = solve_linear(CMatrix(I - z * A), I);
        CMatrix Rn = I;
        for (int j = 0; j < n; ++j) Rn = Rn * R1;
        return cache.emplace(key, std::make_pair(Rn, resolvent_power_sum(A, n, z)))
            .first->second;
      };
      for (const auto& pt : grid) {
        const auto& [Rz, Sz] = terms(pt.z);
        const auto& [Rw, Sw] = terms(pt.zeta);
        const Complex zz = pt.z * std::conj(pt.zeta);
        out.values.push_back(Ip - C * Rz * Ginv * Rw.adjoint() * C.adjoint() +
                             zz * (C * Sz * G1inv * Sw.adjoint() * C.adjoint()));
      }
      break;
    }
  }

  const double defect = hermitian_symmetry_defect(out);
  double scale = 1.0;
  for (const auto& v : out.values) scale = std::max(scale, v.norm());
  if (!(defect <= 1e-10 * scale)) {
    std::ostringstream os;
    os << "kernel_eval: Hermitian symmetry defect " << defect << " for kind "
       << to_string(kind);
    throw InternalConsistencyError(os.str());
  }
  return out;
}

double hermitian_symmetry_defect(const KernelGrid& grid) {
  std::map<std::array<double, 4>, std::size_t> index;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto& pt = grid.points[i];
    index[{pt.z.real(), pt.z.imag(), pt.zeta.real(), pt.zeta.imag()}] = i;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto& pt = grid.points[i];
    auto it = index.find({pt.zeta.real(), pt.zeta.imag(), pt.z.real(), pt.z.imag()});
    if (it == index.end()) continue;
    worst = std::max(worst, (grid.values[i] - grid.values[it->second].adjoint()).norm());
  }
  return worst;
}

Report smperp_decomposition_check(const OutputPair& pair, int k, int N) {
  pair.validate();
  if (k < 0 || N < k + 1) throw DomainError("smperp_decomposition_check: needs 0 <= k < N");
  GramianOptions opts;
  opts.cross_check = false;
  const GramianSet grams = gramians(pair, opts);
  checked_gramian_inverse(grams.G(pair.n), "smperp_decomposition_check");

  const Eigen::Index p = pair.p();
  const Eigen::Index d = pair.d();
  const Eigen::Index dim = p * (N + 1);
  const int n = pair.n;
  CMatrix left(dim, p * k + d);
  CMatrix right(dim, p * k + d);
  for (int j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      CMatrix coeffs = CMatrix::Zero(p, N + 1);
      coeffs(i, j) = 1.0;
      const CVector v = weighted_vec(BergmanElement(n, coeffs));
      left.col(j * p + i) = v;
      right.col(j * p + i) = v;
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    const CVector x = CVector::Unit(d, i);
    // Preimage under S*^k of the truncated range of O.
    const BergmanElement plain = observability_apply(pair, 0, x, N - k);
    CMatrix coeffs = CMatrix::Zero(p, N + 1);
    for (int j = 0; j <= N - k; ++j) {
      coeffs.col(j + k) = Rational(mu(n, j) / mu(n, j + k)).convert_to<double>() *
                          plain.coeffs.col(j);
    }
    left.col(p * k + i) = weighted_vec(BergmanElement(n, coeffs));
    // S^k applied to the shifted observability operator.
    const BergmanElement shifted = observability_apply(pair, k, x, N - k);
    CMatrix rcoeffs = CMatrix::Zero(p, N + 1);
    rcoeffs.rightCols(N + 1 - k) = shifted.coeffs;
    right.col(p * k + i) = weighted_vec(BergmanElement(n, rcoeffs));
  }
  Report report;
  report.add("bergman.shifted_orthocomplement_gap", subspace_gap(left, right), 1e-8,
             "k=" + std::to_string(k));
  return report;
}

}  // namespace blax
