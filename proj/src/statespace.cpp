#include "blax/statespace.hpp"

#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "blax/serieskernels.hpp"

namespace blax {
namespace {

// Above this state dimension the vectorized Stein operator (d^2 x d^2) is
// replaced by a Schur-based column sweep.
constexpr Eigen::Index kVectorizedSteinMaxDim = 16;

double relative_frobenius(const CMatrix& X, const CMatrix& reference) {
  return (X - reference).norm() / std::max(1e-300, reference.norm());
}

CMatrix stein_vectorized(const CMatrix& A, const CMatrix& Q) {
  const Eigen::Index d = A.rows();
  // vec(A* X A) = (A^T kron A*) vec(X) for column-major vec.
  CMatrix L = CMatrix::Identity(d * d, d * d) -
              Eigen::kroneckerProduct(A.transpose(), A.adjoint()).eval();
  CVector q = Eigen::Map<const CVector>(Q.data(), d * d);
  CVector x = solve_linear(L, q, 1e14);
  return Eigen::Map<CMatrix>(x.data(), d, d);
}

CMatrix stein_schur(const CMatrix& A, const CMatrix& Q) {
  const Eigen::Index d = A.rows();
  Eigen::ComplexSchur<CMatrix> schur(A);
  const CMatrix& U = schur.matrixU();
  const CMatrix& T = schur.matrixT();
  const CMatrix Qt = U.adjoint() * Q * U;
  const CMatrix Tstar = T.adjoint();
  CMatrix P = CMatrix::Zero(d, d);
  // Column j of P - T* P T = Q only involves columns l <= j of P.
  for (Eigen::Index j = 0; j < d; ++j) {
    CVector rhs = Qt.col(j);
    if (j > 0) {
      const CVector carried = P.leftCols(j) * T.col(j).head(j);
      rhs += Tstar * carried;
    }
    CMatrix M = -T(j, j) * Tstar;
    M.diagonal().array() += 1.0;
    P.col(j) = M.triangularView<Eigen::Lower>().solve(rhs);
  }
  return U * P * U.adjoint();
}

void require_stable(const CMatrix& A, const char* who) {
  const double rho = spectral_radius(A);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << who << ": spectral radius " << rho << " is not below 1";
    throw StabilityError(os.str());
  }
}

CMatrix stein_system_gap(const CMatrix& A, const CMatrix& C, int n,
                         const CMatrix& H, double* residual) {
  const CMatrix CC = C.adjoint() * C;
  const CMatrix gap = gamma_map(A, H, n) - CC;
  const double scale = std::max(1.0, hermitian_norm(H));
  const CMatrix AHA = A.adjoint() * H * A;
  double r = gap.norm();
  r = std::max(r, std::max(0.0, -min_eigenvalue(CMatrix(H - AHA))) / scale);
  r = std::max(r, std::max(0.0, -min_eigenvalue(AHA)) / scale);
  *residual = r;
  return gap;
}

// G_n from the defining series, summed until the terms stall at round-off.
std::optional<CMatrix> gramian_series_converged(const CMatrix& A,
                                                const CMatrix& C, int n,
                                                int max_terms) {
  const Eigen::Index d = A.rows();
  CMatrix sum = CMatrix::Zero(d, d);
  CMatrix CAj = C;
  int quiet = 0;
  for (int j = 0; j < max_terms; ++j) {
    const CMatrix term = binomial_value(n + j - 1, j) * (CAj.adjoint() * CAj);
    sum += term;
    const double t = term.norm();
    quiet = (t == 0.0 || t <= 1e-17 * sum.norm()) ? quiet + 1 : 0;
    if (quiet >= 10) return hermitian_part(sum);
    CAj = CAj * A;
  }
  return std::nullopt;
}

}  // namespace

OutputPair::OutputPair(CMatrix A_in, CMatrix C_in, int n_in)
    : A(std::move(A_in)), C(std::move(C_in)), n(n_in) {
  validate();
}

void OutputPair::validate() const {
  if (n < 1) throw DomainError("OutputPair: n must be >= 1");
  if (A.rows() < 1 || A.rows() != A.cols()) {
    throw DimensionError("OutputPair: A must be square with d >= 1");
  }
  if (C.rows() < 1 || C.cols() != A.rows()) {
    throw DimensionError("OutputPair: C must be p x d with p >= 1");
  }
  if (!A.allFinite() || !C.allFinite()) {
    throw DomainError("OutputPair: non-finite entry");
  }
}

const CMatrix& GramianSet::G(int m) const {
  if (m < 0 || m >= static_cast<int>(plain.size())) {
    throw DomainError("GramianSet: plain gramian " + std::to_string(m) +
                      " not available");
  }
  return plain[static_cast<std::size_t>(m)];
}

const CMatrix& GramianSet::shifted_at(int k) const {
  if (k < 0 || k >= static_cast<int>(shifted.size())) {
    throw DomainError("GramianSet: shifted gramian " + std::to_string(k) +
                      " not available");
  }
  return shifted[static_cast<std::size_t>(k)];
}

CMatrix checked_gramian_inverse(const CMatrix& G, const char* who) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(G);
  const double lo = ev.size() > 0 ? ev.minCoeff() : 0.0;
  const double cond =
      lo > 0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0) || !(cond < 1e10)) {
    std::ostringstream os;
    os << who << ": gramian not invertible (min eigenvalue " << lo
       << ", condition " << cond << ")";
    throw ObservabilityError(os.str());
  }
  return hermitian_inverse(G);
}

CMatrix gamma_map(const CMatrix& A, const CMatrix& H, int n) {
  internal::require_square(A, "gamma_map");
  internal::require_square(H, "gamma_map");
  if (A.rows() != H.rows()) throw DimensionError("gamma_map: A and H differ in size");
  if (n < 0) throw DomainError("gamma_map: n must be >= 0");
  CMatrix out = CMatrix::Zero(H.rows(), H.cols());
  CMatrix term = H;
  for (int k = 0; k <= n; ++k) {
    const double w = binomial_value(n, k);
    out += ((k % 2 == 0) ? w : -w) * term;
    term = A.adjoint() * term * A;
  }
  return hermitian_part(out);
}

CMatrix stein_solve(const CMatrix& A, const CMatrix& Q) {
  internal::require_square(A, "stein_solve");
  internal::require_square(Q, "stein_solve");
  if (A.rows() != Q.rows()) throw DimensionError("stein_solve: A and Q differ in size");
  const double rho = spectral_radius(A);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "stein_solve: spectral radius " << rho << " >= 1, no unique solution";
    throw StabilityError(os.str());
  }
  CMatrix P = A.rows() <= kVectorizedSteinMaxDim ? stein_vectorized(A, Q)
                                                 : stein_schur(A, Q);
  P = hermitian_part(P);
  const double residual = (P - A.adjoint() * P * A - Q).norm();
  if (residual > 1e-10 * std::max(Q.norm(), 1e-300) && residual > 1e-300) {
    std::ostringstream os;
    os << "stein_solve: residual " << residual << " exceeds 1e-10 ||Q||";
    throw InternalConsistencyError(os.str());
  }
  return P;
}

CMatrix gramian_series(const CMatrix& A, const CMatrix& C, int n, int k,
                       int terms) {
  CMatrix sum = CMatrix::Zero(A.rows(), A.cols());
  CMatrix CAj = C;
  for (int j = 0; j < terms; ++j) {
    sum += binomial_value(n + j + k - 1, j + k) * (CAj.adjoint() * CAj);
    CAj = CAj * A;
  }
  return hermitian_part(sum);
}

CMatrix shifted_gramian_from_plain(const CMatrix& A, const CMatrix& Gn, int n,
                                   int k) {
  if (k == 0) return Gn;
  const std::vector<BigInt> c = shift_polynomial(n, k);
  CMatrix out = CMatrix::Zero(A.rows(), A.cols());
  CMatrix term = Gn;
  for (const BigInt& cq : c) {
    out += cq.convert_to<double>() * term;
    term = A.adjoint() * term * A;
  }
  return hermitian_part(out);
}

GramianSet gramians(const OutputPair& pair, const GramianOptions& options) {
  pair.validate();
  require_stable(pair.A, "gramians");
  const CMatrix& A = pair.A;
  const CMatrix& C = pair.C;
  const int n = pair.n;

  GramianSet out;
  out.plain.push_back(hermitian_part(CMatrix(C.adjoint() * C)));
  for (int m = 1; m <= n; ++m) out.plain.push_back(stein_solve(A, out.plain.back()));
  for (int k = 0; k <= options.k_max; ++k) {
    out.shifted.push_back(shifted_gramian_from_plain(A, out.plain.back(), n, k));
  }

  if (options.cross_check) {
    for (int m = 1; m <= n; ++m) {
      const CMatrix series = gramian_series(A, C, m, 0, options.series_terms);
      const double err = relative_frobenius(out.plain[static_cast<std::size_t>(m)], series);
      if (!(err <= options.cross_check_tol)) {
        std::ostringstream os;
        os << "gramians: Stein recursion and series disagree for G_" << m
           << " (relative " << err << ")";
        throw InternalConsistencyError(os.str());
      }
    }
    for (int k = 1; k <= options.k_max; ++k) {
      const CMatrix series = gramian_series(A, C, n, k, options.series_terms);
      const double err = relative_frobenius(out.shifted[static_cast<std::size_t>(k)], series);
      if (!(err <= options.cross_check_tol)) {
        std::ostringstream os;
        os << "gramians: closed form and series disagree for shifted k=" << k
           << " (relative " << err << ")";
        throw InternalConsistencyError(os.str());
      }
    }
  }
  return out;
}

Classification classify_pair(const OutputPair& pair, const CMatrix& H) {
  pair.validate();
  internal::require_square(H, "classify_pair");
  if (H.rows() != pair.d()) throw DimensionError("classify_pair: H must be d x d");
  const CMatrix& A = pair.A;
  const CMatrix CC = pair.C.adjoint() * pair.C;

  auto combine = [](Verdict a, Verdict b) { return std::min(a, b); };

  Classification c;
  const CMatrix AHA = A.adjoint() * H * A;
  c.contraction_like = combine(psd_verdict(CMatrix(H - AHA)), psd_verdict(AHA));
  const CMatrix gn = gamma_map(A, H, pair.n);
  c.stein_inequality = psd_verdict(CMatrix(gn - CC));
  c.stein_equality =
      (gn - CC).norm() <= 1e-10 * std::max(1.0, hermitian_norm(H));
  c.n_hypercontractive = Verdict::Pass;
  for (int k = 0; k <= pair.n; ++k) {
    c.n_hypercontractive = combine(c.n_hypercontractive, psd_verdict(gamma_map(A, H, k)));
  }
  c.strongly_stable = spectral_radius(A) < 1.0 - 1e-10;
  if (c.strongly_stable) {
    GramianOptions opts;
    opts.cross_check = false;
    const GramianSet g = gramians(pair, opts);
    c.exactly_observable = min_eigenvalue(g.G(pair.n)) > 1e-10;
  }
  return c;
}

SteinUniquenessReport stein_uniqueness_probe(const OutputPair& pair) {
  pair.validate();
  const CMatrix& A = pair.A;
  const double norm = spectral_norm(A);
  if (norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "stein_uniqueness_probe: ||A|| = " << norm << " exceeds 1";
    throw PreconditionError(os.str());
  }

  SteinUniquenessReport report;
  CMatrix delta = CMatrix::Identity(A.rows(), A.cols());
  constexpr int kMaxIterations = 100000;
  for (int it = 1; it <= kMaxIterations; ++it) {
    CMatrix next = hermitian_part(CMatrix(A.adjoint() * delta * A));
    const double step = (next - delta).norm();
    delta = std::move(next);
    report.iterations = it;
    if (step < 1e-12) {
      report.converged = true;
      break;
    }
  }
  report.delta = delta;
  if (!report.converged) return report;

  const bool delta_zero = delta.norm() <= 1e-10;
  if (delta_zero) report.delta.setZero();
  if (spectral_radius(A) < 1.0) {
    GramianOptions opts;
    opts.cross_check = false;
    report.gramian = gramians(pair, opts).G(pair.n);
  } else {
    auto g = gramian_series_converged(A, pair.C, pair.n, kMaxIterations);
    if (!g) {
      report.converged = false;
      return report;
    }
    report.gramian = *g;
  }
  stein_system_gap(A, pair.C, pair.n, report.gramian, &report.gramian_residual);
  report.unique = delta_zero;
  if (!delta_zero) {
    CMatrix second = report.gramian + report.delta;
    stein_system_gap(A, pair.C, pair.n, second, &report.second_residual);
    report.second_solution = std::move(second);
  }
  return report;
}

SqueezeReport squeeze_check(const CMatrix& A, const CMatrix& H, int n) {
  internal::require_square(A, "squeeze_check");
  internal::require_square(H, "squeeze_check");
  if (A.rows() != H.rows()) throw DimensionError("squeeze_check: A and H differ in size");
  if (n < 3) throw PreconditionError("squeeze_check: needs n >= 3");
  const double h = std::max(hermitian_norm(H), 1e-300);
  const CMatrix AHA = A.adjoint() * H * A;
  const double pre_tol = -1e-10 * h;
  if (min_eigenvalue(CMatrix(H - AHA)) < pre_tol) {
    throw PreconditionError("squeeze_check: H >= A*HA fails");
  }
  if (min_eigenvalue(AHA) < pre_tol) {
    throw PreconditionError("squeeze_check: A*HA >= 0 fails");
  }
  if (min_eigenvalue(gamma_map(A, H, n)) < pre_tol) {
    throw PreconditionError("squeeze_check: Gamma_n[H] >= 0 fails");
  }
  SqueezeReport report;
  report.threshold = -1e-9 * h;
  report.holds = true;
  for (int k = 1; k < n; ++k) {
    const double lo = min_eigenvalue(gamma_map(A, H, k));
    report.min_eigenvalues.push_back(lo);
    if (lo < report.threshold) report.holds = false;
  }
  return report;
}

Report metric_constraint_check(const OutputPair& pair,
                               const StageColligation& stage,
                               const GramianSet& grams) {
  pair.validate();
  const int k = stage.k;
  const int n = pair.n;
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const Eigen::Index u = stage.u();
  if (stage.B.rows() != d || stage.D.rows() != p || stage.D.cols() != u) {
    throw DimensionError("metric_constraint_check: stage " + std::to_string(k) +
                         " has inconsistent B/D shapes");
  }
  const CMatrix& Gk = grams.shifted_at(k);
  const CMatrix& Gk1 = grams.shifted_at(k + 1);
  const double w = binomial_value(n + k - 1, k);
  const double m = 1.0 / w;
  const CMatrix& A = pair.A;
  const CMatrix& C = pair.C;
  const CMatrix& B = stage.B;
  const CMatrix& D = stage.D;

  const CMatrix Gk_inv = checked_gramian_inverse(Gk, "metric_constraint_check");
  const CMatrix Gk1_inv = checked_gramian_inverse(Gk1, "metric_constraint_check");

  Report report;
  report.add("metric.cross_term", (A.adjoint() * Gk1 * B + w * C.adjoint() * D).norm(),
             1e-9);
  report.add("metric.input_isometry",
             (CMatrix::Identity(u, u) - B.adjoint() * Gk1 * B - w * D.adjoint() * D).norm(),
             1e-9);

  CMatrix U(d + p, d + u);
  U << A, B, C, D;
  const CMatrix coisometry =
      U * block_diag(Gk_inv, CMatrix::Identity(u, u)) * U.adjoint() -
      block_diag(Gk1_inv, CMatrix(m * CMatrix::Identity(p, p)));
  report.add("metric.weighted_coisometry", coisometry.norm(), 1e-9);
  const CMatrix isometry =
      U.adjoint() * block_diag(Gk1, CMatrix(w * CMatrix::Identity(p, p))) * U -
      block_diag(Gk, CMatrix::Identity(u, u));
  report.add("metric.weighted_isometry", isometry.norm(), 1e-9);
  return report;
}

}  // namespace blax
