#include "blax/beurlinglax.hpp"

#include <sstream>

#include <Eigen/SVD>

#include "blax/serieskernels.hpp"

namespace blax {
namespace {

double kernel_residual(const CMatrix& lhs, const CMatrix& rhs) {
  return (lhs - rhs).norm() / std::max({1.0, lhs.norm(), rhs.norm()});
}

CMatrix resolvent(const CMatrix& A, Complex z) {
  const CMatrix I = CMatrix::Identity(A.rows(), A.cols());
  return solve_linear(CMatrix(I - z * A), I);
}

// Column `col` of z^shift * table as a truncated Bergman element.
BergmanElement shifted_column(const TaylorTable& table, Eigen::Index col,
                              int shift, int N, int n) {
  CMatrix coeffs = CMatrix::Zero(table.rows(), N + 1);
  for (int j = shift; j <= N; ++j) {
    const int src = j - shift;
    if (src > table.N()) break;
    coeffs.col(j) = table.coeffs[static_cast<std::size_t>(src)].col(col);
  }
  return BergmanElement(n, std::move(coeffs));
}

std::string stage_point(int k, const GridPoint& pt) {
  return "k=" + std::to_string(k) + " " + format_point(pt);
}

// Taylor table of the product of two series given by coefficient lists.
TaylorTable convolve(const std::vector<CMatrix>& left,
                     const std::vector<CMatrix>& right, int N) {
  TaylorTable out;
  for (int i = 0; i <= N; ++i) {
    CMatrix acc = CMatrix::Zero(left.front().rows(), right.front().cols());
    for (int a = 0; a <= i; ++a) {
      acc += left[static_cast<std::size_t>(a)] * right[static_cast<std::size_t>(i - a)];
    }
    out.coeffs.push_back(std::move(acc));
  }
  return out;
}

GramianSet family_gramians(const OutputPair& pair, int k_max) {
  GramianOptions opts;
  opts.k_max = k_max;
  opts.series_terms = std::max<int>(200, static_cast<int>(pair.d()) + 1);
  return gramians(pair, opts);
}

}  // namespace

void TaylorTable::validate() const {
  for (const auto& c : coeffs) {
    if (c.rows() != rows() || c.cols() != cols()) {
      throw DimensionError("TaylorTable: coefficients differ in shape");
    }
  }
}

CMatrix TaylorTable::evaluate(Complex z) const {
  if (coeffs.empty()) return CMatrix();
  CMatrix acc = coeffs.back();
  for (int j = N() - 1; j >= 0; --j) {
    acc = acc * z + coeffs[static_cast<std::size_t>(j)];
  }
  return acc;
}

CMatrix theta_stage(const OutputPair& pair, const StageColligation& stage,
                    Complex z) {
  if (!(std::abs(z) <= 0.9 + 1e-12)) {
    throw DomainError("theta_stage: |z| must be <= 0.9");
  }
  const int n = pair.n;
  const int k = stage.k;
  return binomial_value(k + n - 1, k) * stage.D +
         z * pair.C * shifted_resolvent(pair.A, n, k + 1, z) * stage.B;
}

TaylorTable theta_taylor(const OutputPair& pair, const StageColligation& stage,
                         int N) {
  if (N < 0) throw DomainError("theta_taylor: N must be >= 0");
  const int n = pair.n;
  const int k = stage.k;
  TaylorTable out;
  out.coeffs.push_back(binomial_value(n + k - 1, k) * stage.D);
  CMatrix AjB = stage.B;
  for (int j = 1; j <= N; ++j) {
    out.coeffs.push_back(binomial_value(n + j + k - 1, j + k) * (pair.C * AjB));
    AjB = pair.A * AjB;
  }
  return out;
}

StageColligation inner_stage(const OutputPair& pair, const GramianSet& grams,
                             int k) {
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const CMatrix Gk_inv = checked_gramian_inverse(grams.shifted_at(k), "inner_stage");
  const CMatrix Gk1_inv = checked_gramian_inverse(grams.shifted_at(k + 1), "inner_stage");
  CMatrix AC(d + p, d);
  AC << pair.A, pair.C;
  const double m = mu_value(pair.n, k);
  const CMatrix defect = hermitian_part(CMatrix(
      block_diag(Gk1_inv, CMatrix(m * CMatrix::Identity(p, p))) - AC * Gk_inv * AC.adjoint()));
  CMatrix V;
  try {
    V = psd_factor(defect);
  } catch (const NotPsdError& e) {
    throw ConstructionError("inner_stage: defect for k=" + std::to_string(k) +
                            " is not positive semidefinite (" + e.what() + ")");
  }
  StageColligation stage;
  stage.k = k;
  stage.B = V.topRows(d);
  stage.D = V.bottomRows(p);
  return stage;
}

InnerFamily build_inner_family(const OutputPair& pair, int K, int N) {
  pair.validate();
  if (K < 0) throw DomainError("build_inner_family: K must be >= 0");
  InnerFamily fam;
  fam.pair = pair;
  fam.grams = family_gramians(pair, K + 1);
  checked_gramian_inverse(fam.grams.G(pair.n), "build_inner_family");
  for (int k = 0; k <= K; ++k) {
    StageColligation stage = inner_stage(pair, fam.grams, k);
    const Report metric = metric_constraint_check(pair, stage, fam.grams);
    if (!metric.all_pass()) {
      std::ostringstream os;
      os << "build_inner_family: stage " << k << " violates";
      for (const auto& c : metric.checks()) {
        if (!c.pass) os << " " << c.name << " (" << c.residual << ")";
      }
      throw ConstructionError(os.str());
    }
    fam.thetas.push_back(theta_taylor(pair, stage, N));
    fam.stages.push_back(std::move(stage));
  }
  return fam;
}

CMatrix inner_family_gram(const InnerFamily& fam, int N) {
  std::vector<BergmanElement> cols;
  for (std::size_t s = 0; s < fam.stages.size(); ++s) {
    const int k = fam.stages[s].k;
    for (Eigen::Index c = 0; c < fam.stages[s].u(); ++c) {
      cols.push_back(shifted_column(fam.thetas[s], c, k, N, fam.pair.n));
    }
  }
  const auto m = static_cast<Eigen::Index>(cols.size());
  CMatrix gram(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      gram(a, b) = bergman_inner(cols[static_cast<std::size_t>(b)],
                                 cols[static_cast<std::size_t>(a)]);
    }
  }
  return gram;
}

Report verify_inner_family(const InnerFamily& fam,
                           const std::vector<GridPoint>& grid, int N) {
  const OutputPair& pair = fam.pair;
  const int n = pair.n;
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  constexpr int kExtraShifts = 8;

  std::vector<BergmanElement> obs;
  for (Eigen::Index i = 0; i < d; ++i) {
    obs.push_back(observability_apply(pair, 0, CVector::Unit(d, i), N));
  }

  MaxResidual orth_range;
  MaxResidual orth_shift;
  MaxResidual isometry;
  MaxResidual coisometry_kernel;
  MaxResidual difference_kernel;

  for (std::size_t s = 0; s < fam.stages.size(); ++s) {
    const StageColligation& stage = fam.stages[s];
    const int k = stage.k;
    const TaylorTable& theta = fam.thetas[s];
    const Eigen::Index u = stage.u();

    std::vector<BergmanElement> phi;
    for (Eigen::Index c = 0; c < u; ++c) phi.push_back(shifted_column(theta, c, k, N, n));

    for (Eigen::Index a = 0; a < u; ++a) {
      const double na = std::sqrt(bergman_norm_squared(phi[static_cast<std::size_t>(a)]));
      for (Eigen::Index b = 0; b < d; ++b) {
        const auto& o = obs[static_cast<std::size_t>(b)];
        const double nb = std::sqrt(bergman_norm_squared(o));
        const double r = std::abs(bergman_inner(phi[static_cast<std::size_t>(a)], o)) /
                         std::max(1e-300, na * nb);
        orth_range.observe_lazy(r, [&] {
          return "k=" + std::to_string(k) + " u=" + std::to_string(a) + " x=" + std::to_string(b);
        });
      }
      for (Eigen::Index b = 0; b < u; ++b) {
        const Complex g = bergman_inner(phi[static_cast<std::size_t>(b)],
                                        phi[static_cast<std::size_t>(a)]);
        isometry.observe_lazy(std::abs(g - (a == b ? 1.0 : 0.0)), [&] {
          return "k=" + std::to_string(k) + " (" + std::to_string(a) + "," + std::to_string(b) + ")";
        });
        for (int m = k + 1; m <= std::min(N, k + kExtraShifts); ++m) {
          const BergmanElement lifted = shifted_column(theta, b, m, N, n);
          orth_shift.observe_lazy(
              std::abs(bergman_inner(lifted, phi[static_cast<std::size_t>(a)])), [&] {
                return "k=" + std::to_string(k) + " m=" + std::to_string(m);
              });
        }
      }
    }

    const double m_k = mu_value(n, k);
    const CMatrix Gk_inv = checked_gramian_inverse(fam.grams.shifted_at(k), "verify_inner_family");
    const CMatrix Gk1_inv =
        checked_gramian_inverse(fam.grams.shifted_at(k + 1), "verify_inner_family");
    const KernelGrid kdif = kernel_eval(KernelKind::kDifference, pair, fam.grams, nullptr, k, grid);
    const CMatrix Ip = CMatrix::Identity(p, p);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const GridPoint& pt = grid[g];
      const CMatrix tz = theta_stage(pair, stage, pt.z);
      const CMatrix tw = theta_stage(pair, stage, pt.zeta);
      const CMatrix prod = tz * tw.adjoint();
      const Complex zz = pt.z * std::conj(pt.zeta);
      const CMatrix Rz0 = shifted_resolvent(pair.A, n, k, pt.z);
      const CMatrix Rw0 = shifted_resolvent(pair.A, n, k, pt.zeta);
      const CMatrix Rz1 = shifted_resolvent(pair.A, n, k + 1, pt.z);
      const CMatrix Rw1 = shifted_resolvent(pair.A, n, k + 1, pt.zeta);
      const CMatrix lhs = Ip / m_k - prod;
      const CMatrix rhs = pair.C * Rz0 * Gk_inv * Rw0.adjoint() * pair.C.adjoint() -
                          zz * (pair.C * Rz1 * Gk1_inv * Rw1.adjoint() * pair.C.adjoint());
      coisometry_kernel.observe_lazy(kernel_residual(lhs, rhs),
                                     [&] { return stage_point(k, pt); });
      difference_kernel.observe_lazy(kernel_residual(kdif.values[g], ipow(zz, k) * prod),
                                     [&] { return stage_point(k, pt); });
    }
  }

  Report report;
  report.add("inner.orthogonal_to_range", orth_range.value(), 1e-8, orth_range.witness());
  report.add("inner.orthogonal_to_higher_shifts", orth_shift.value(), 1e-8, orth_shift.witness());
  report.add("inner.isometric", isometry.value(), 1e-8, isometry.witness());
  report.add("inner.coisometry_kernel", coisometry_kernel.value(), 1e-8,
             coisometry_kernel.witness());
  report.add("inner.difference_kernel_factorization", difference_kernel.value(), 1e-8,
             difference_kernel.witness());
  const CMatrix gram = inner_family_gram(fam, N);
  const double gram_res =
      gram.size() == 0 ? 0.0
                       : (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  report.add("inner.family_gram_identity", gram_res, 1e-8);
  return report;
}

CMatrix defect_kernel(const OutputPair& pair, const StageColligation& stage,
                      const GramianSet& grams, Complex z, Complex zeta) {
  const int n = pair.n;
  const int k = stage.k;
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const Eigen::Index u = stage.u();
  const CMatrix Gk_inv = checked_gramian_inverse(grams.shifted_at(k), "defect_kernel");
  const CMatrix Gk1_inv = checked_gramian_inverse(grams.shifted_at(k + 1), "defect_kernel");
  const double m = mu_value(n, k);
  CMatrix U(d + p, d + u);
  U << pair.A, stage.B, pair.C, stage.D;
  const CMatrix W = block_diag(Gk1_inv, CMatrix(m * CMatrix::Identity(p, p))) -
                    U * block_diag(Gk_inv, CMatrix::Identity(u, u)) * U.adjoint();
  auto row = [&](Complex w) {
    CMatrix r(p, d + p);
    r << w * pair.C * shifted_resolvent(pair.A, n, k + 1, w),
        CMatrix::Identity(p, p) / m;
    return r;
  };
  return row(z) * W * row(zeta).adjoint();
}

CMatrix MultiplierFamily::psi(int j, Complex z) const {
  if (j < 1 || j > n) throw DomainError("MultiplierFamily::psi: j out of range");
  const CMatrix R = resolvent(A, z);
  const auto idx = static_cast<std::size_t>(j - 1);
  if (j == 1) return D[idx] + z * C * R * B[idx];
  return D[idx] + z * plain_sqrt[static_cast<std::size_t>(j - 1)] * R * B[idx];
}

CMatrix MultiplierFamily::f(int l, Complex z) const {
  if (l < 1 || l > n) throw DomainError("MultiplierFamily::f: l out of range");
  if (l == n) return psi(1, z);
  const CMatrix R = resolvent(A, z);
  CMatrix left = C;
  for (int i = 0; i < n - l; ++i) left = left * R;
  return left * plain_inv_sqrt[static_cast<std::size_t>(n - l)] * psi(n + 1 - l, z);
}

Approach1Result approach1_build(const OutputPair& pair,
                                const std::vector<GridPoint>& grid, int N) {
  pair.validate();
  const int n = pair.n;
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const CMatrix& A = pair.A;
  const CMatrix& C = pair.C;
  const GramianSet grams = family_gramians(pair, 0);

  Approach1Result result;
  MultiplierFamily& fam = result.family;
  fam.n = n;
  fam.A = A;
  fam.C = C;
  fam.plain = grams.plain;
  fam.plain_sqrt.push_back(hermitian_sqrt(grams.G(0)));
  fam.plain_inv_sqrt.push_back(CMatrix());
  std::vector<CMatrix> G_inv(1);
  for (int m = 1; m <= n; ++m) {
    G_inv.push_back(checked_gramian_inverse(grams.G(m), "approach1_build"));
    fam.plain_sqrt.push_back(hermitian_sqrt(grams.G(m)));
    fam.plain_inv_sqrt.push_back(hermitian_inv_sqrt(grams.G(m)));
  }

  // Psi_1 from the unitary completion of [A; C] in the G_1 metric.
  {
    CMatrix AC(d + p, d);
    AC << A, C;
    const CMatrix defect = hermitian_part(CMatrix(
        block_diag(G_inv[1], CMatrix::Identity(p, p)) - AC * G_inv[1] * AC.adjoint()));
    CMatrix V;
    try {
      V = psd_factor(defect);
    } catch (const NotPsdError& e) {
      throw ConstructionError(std::string("approach1_build: completion defect: ") + e.what());
    }
    fam.B.push_back(V.topRows(d));
    fam.D.push_back(V.bottomRows(p));
  }
  for (int j = 2; j <= n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const CMatrix Bj = hermitian_sqrt(CMatrix(G_inv[jj] - A * G_inv[jj] * A.adjoint()));
    const CMatrix Dj = -fam.plain_inv_sqrt[jj - 1] * A.adjoint() * grams.G(j) * Bj;
    fam.B.push_back(Bj);
    fam.D.push_back(Dj);
  }

  // Taylor tables of F_l as products of two series.
  for (int l = 1; l <= n; ++l) {
    const int j = (l == n) ? 1 : n + 1 - l;
    const auto jdx = static_cast<std::size_t>(j - 1);
    const CMatrix& out_map = (j == 1) ? C : fam.plain_sqrt[static_cast<std::size_t>(j - 1)];
    std::vector<CMatrix> psi_coeffs{fam.D[jdx]};
    CMatrix AiB = fam.B[jdx];
    for (int i = 1; i <= N; ++i) {
      psi_coeffs.push_back(out_map * AiB);
      AiB = A * AiB;
    }
    if (l == n) {
      TaylorTable t;
      t.coeffs = std::move(psi_coeffs);
      fam.F.push_back(std::move(t));
      continue;
    }
    const int e = n - l;
    std::vector<CMatrix> left;
    CMatrix Ai = CMatrix::Identity(d, d);
    for (int i = 0; i <= N; ++i) {
      left.push_back(binomial_value(e + i - 1, i) * (C * Ai) *
                     fam.plain_inv_sqrt[static_cast<std::size_t>(e)]);
      Ai = Ai * A;
    }
    fam.F.push_back(convolve(left, psi_coeffs, N));
  }

  // Kernel identities on the grid.
  MaxResidual psi_kernel;
  MaxResidual sum_kernel;
  MaxResidual alternate;
  MaxResidual taylor;
  int alternate_used = 0;
  const KernelGrid kM = kernel_eval(KernelKind::kSubspace, pair, grams, nullptr, 0, grid);

  std::vector<std::optional<CMatrix>> B_inv(static_cast<std::size_t>(n + 1));
  for (int j = 2; j <= n; ++j) {
    const CMatrix& Bj = fam.B[static_cast<std::size_t>(j - 1)];
    if (Bj.rows() == Bj.cols() && condition_estimate(Bj) < 1e10) {
      B_inv[static_cast<std::size_t>(j)] = solve_linear(Bj, CMatrix::Identity(d, d));
      ++alternate_used;
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& pt = grid[g];
    const Complex zz = pt.z * std::conj(pt.zeta);
    const Complex s = Complex(1.0) - zz;
    const CMatrix Rz = resolvent(A, pt.z);
    const CMatrix Rw = resolvent(A, pt.zeta);
    for (int j = 1; j <= n; ++j) {
      const CMatrix pz = fam.psi(j, pt.z);
      const CMatrix pw = fam.psi(j, pt.zeta);
      const CMatrix lhs = CMatrix::Identity(pz.rows(), pz.rows()) - pz * pw.adjoint();
      const auto jj = static_cast<std::size_t>(j);
      const CMatrix& out_map = (j == 1) ? C : fam.plain_sqrt[jj - 1];
      const CMatrix rhs = s * (out_map * Rz * G_inv[jj] * Rw.adjoint() * out_map.adjoint());
      psi_kernel.observe_lazy(kernel_residual(lhs, rhs), [&] {
        return "j=" + std::to_string(j) + " " + format_point(pt);
      });
      if (j >= 2 && B_inv[jj]) {
        const CMatrix alt = fam.plain_sqrt[jj - 1] * Rz * G_inv[jj] *
                            (pt.z * CMatrix::Identity(d, d) - A.adjoint()) * (*B_inv[jj]);
        alternate.observe_lazy(kernel_residual(pz, alt), [&] {
          return "j=" + std::to_string(j) + " " + format_point(pt);
        });
      }
    }
    CMatrix sum = CMatrix::Zero(p, p);
    for (int l = 1; l <= n; ++l) {
      sum += fam.f(l, pt.z) * fam.f(l, pt.zeta).adjoint() / ipow(s, l);
    }
    sum_kernel.observe_lazy(kernel_residual(kM.values[g], sum),
                            [&] { return format_point(pt); });
  }
  for (Complex z : default_sample_points()) {
    if (std::abs(z) > 0.5 + 1e-12) continue;
    for (int l = 1; l <= n; ++l) {
      taylor.observe_lazy(
          kernel_residual(fam.F[static_cast<std::size_t>(l - 1)].evaluate(z), fam.f(l, z)),
          [&] { return "l=" + std::to_string(l); });
    }
  }

  Report& report = result.report;
  report.add("approach1.psi_kernel", psi_kernel.value(), 1e-8, psi_kernel.witness());
  report.add("approach1.sum_factorization", sum_kernel.value(), 1e-8, sum_kernel.witness());
  report.add("approach1.alternate_form", alternate.value(), 1e-8,
             alternate_used == 0 ? std::string("skipped: no invertible B_j")
                                 : alternate.witness());
  report.add("approach1.taylor_consistency", taylor.value(), 1e-10, taylor.witness());
  return result;
}

Report approach2_predicate(const TaylorTable& theta, int n, int N) {
  theta.validate();
  if (theta.N() < N) throw DomainError("approach2_predicate: table shorter than N");
  const Eigen::Index p = theta.rows();
  const Eigen::Index u = theta.cols();
  CMatrix M = CMatrix::Zero(p * (N + 1), u * (N + 1));
  std::vector<double> root_mu(static_cast<std::size_t>(N + 1));
  for (int j = 0; j <= N; ++j) root_mu[static_cast<std::size_t>(j)] = std::sqrt(mu_value(n, j));
  for (int j = 0; j <= N; ++j) {
    for (int i = 0; i <= j; ++i) {
      M.block(j * p, i * u, p, u) = (root_mu[static_cast<std::size_t>(j)] /
                                     root_mu[static_cast<std::size_t>(i)]) *
                                    theta.coeffs[static_cast<std::size_t>(j - i)];
    }
  }
  const double sigma = spectral_norm(M);
  Report report;
  std::ostringstream os;
  os << "largest singular value " << sigma;
  report.add("approach2.contractive", std::max(0.0, sigma - 1.0), 1e-8, os.str());
  return report;
}

TaylorTable blaschke_taylor(Complex alpha, int N) {
  TaylorTable t;
  const Complex ac = std::conj(alpha);
  const double w = 1.0 - std::norm(alpha);
  t.coeffs.push_back(CMatrix::Constant(1, 1, -alpha));
  Complex power = 1.0;
  for (int j = 1; j <= N; ++j) {
    t.coeffs.push_back(CMatrix::Constant(1, 1, w * power));
    power *= ac;
  }
  return t;
}

Report approach2_onezero_instance(Complex alpha, int n, int N) {
  if (!(std::abs(alpha) < 1.0)) throw DomainError("approach2_onezero_instance: |alpha| >= 1");
  const TaylorTable b = blaschke_taylor(alpha, N);
  Report report = approach2_predicate(b, n, N);

  std::vector<double> root_mu(static_cast<std::size_t>(N + 1));
  for (int j = 0; j <= N; ++j) root_mu[static_cast<std::size_t>(j)] = std::sqrt(mu_value(n, j));
  // Range of multiplication by b_alpha on polynomials of degree < N.
  CMatrix range = CMatrix::Zero(N + 1, N);
  for (int i = 0; i < N; ++i) {
    for (int j = i; j <= N; ++j) {
      range(j, i) = root_mu[static_cast<std::size_t>(j)] *
                    b.coeffs[static_cast<std::size_t>(j - i)](0, 0);
    }
  }
  // Evaluation at alpha is the inner product with v in weighted-orthonormal
  // coordinates; the zero subspace is v-perp.
  CVector v(N + 1);
  Complex power = 1.0;
  for (int j = 0; j <= N; ++j) {
    v(j) = std::conj(power) / root_mu[static_cast<std::size_t>(j)];
    power *= alpha;
  }
  const CMatrix v_mat = v;
  Eigen::HouseholderQR<CMatrix> qr(v_mat);
  const CMatrix Q = qr.householderQ() * CMatrix::Identity(N + 1, N + 1);
  const CMatrix zeros = Q.rightCols(N);
  report.add("approach2.onezero_range_gap", subspace_gap(range, zeros), 1e-8);
  return report;
}

CMatrix approach4_evaluate(const OutputPair& pair, const StageColligation& stage,
                           Complex z) {
  const CMatrix R1 = resolvent(pair.A, z);
  CMatrix sum = CMatrix::Zero(pair.d(), pair.d());
  CMatrix power = CMatrix::Identity(pair.d(), pair.d());
  for (int j = 1; j <= pair.n; ++j) {
    power = power * R1;
    sum += power;
  }
  return stage.D + z * pair.C * sum * stage.B;
}

Approach4Result approach4_build(const OutputPair& pair,
                                const std::vector<GridPoint>& grid, int N) {
  pair.validate();
  if (!(spectral_radius(pair.A) < 1.0 - 1e-10)) {
    throw StabilityError("approach4_build: A is not strongly stable");
  }
  const int n = pair.n;
  const Eigen::Index d = pair.d();
  const Eigen::Index p = pair.p();
  const GramianSet grams = family_gramians(pair, 1);
  const CMatrix G_inv = checked_gramian_inverse(grams.G(n), "approach4_build");
  const CMatrix G1_inv = checked_gramian_inverse(grams.shifted_at(1), "approach4_build");

  CMatrix AC(d + p, d);
  AC << pair.A, pair.C;
  const CMatrix defect = hermitian_part(
      CMatrix(block_diag(G1_inv, CMatrix::Identity(p, p)) - AC * G_inv * AC.adjoint()));
  CMatrix V;
  try {
    V = psd_factor(defect);
  } catch (const NotPsdError& e) {
    throw ConstructionError(std::string("approach4_build: ") + e.what());
  }
  Approach4Result result;
  result.stage.k = 0;
  result.stage.B = V.topRows(d);
  result.stage.D = V.bottomRows(p);

  // Taylor coefficient i >= 1 of sum_j (I - zA)^{-j} z is
  // sum_{j=1}^n binom(j + i - 2, i - 1) A^{i-1}.
  result.theta.coeffs.push_back(result.stage.D);
  CMatrix AiB = result.stage.B;
  for (int i = 1; i <= N; ++i) {
    double weight = 0.0;
    for (int j = 1; j <= n; ++j) weight += binomial_value(j + i - 2, i - 1);
    result.theta.coeffs.push_back(weight * (pair.C * AiB));
    AiB = pair.A * AiB;
  }

  MaxResidual kernel;
  MaxResidual against_family;
  const KernelGrid kE = kernel_eval(KernelKind::kWandering, pair, grams, nullptr, 0, grid);
  const StageColligation stage0 = inner_stage(pair, grams, 0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& pt = grid[g];
    const CMatrix prod = approach4_evaluate(pair, result.stage, pt.z) *
                         approach4_evaluate(pair, result.stage, pt.zeta).adjoint();
    kernel.observe_lazy(kernel_residual(kE.values[g], prod), [&] { return format_point(pt); });
    const CMatrix fam = theta_stage(pair, stage0, pt.z) * theta_stage(pair, stage0, pt.zeta).adjoint();
    against_family.observe_lazy(kernel_residual(fam, prod), [&] { return format_point(pt); });
  }

  MaxResidual orth;
  const Eigen::Index u = result.stage.u();
  for (Eigen::Index a = 0; a < u; ++a) {
    const BergmanElement base = shifted_column(result.theta, a, 0, N, n);
    for (Eigen::Index b = 0; b < u; ++b) {
      for (int k = 1; k <= 8; ++k) {
        const BergmanElement lifted = shifted_column(result.theta, b, k, N, n);
        orth.observe_lazy(std::abs(bergman_inner(lifted, base)),
                          [&] { return "k=" + std::to_string(k); });
      }
    }
  }

  Report& report = result.report;
  report.add("approach4.wandering_kernel", kernel.value(), 1e-8, kernel.witness());
  report.add("approach4.wandering_orthogonality", orth.value(), 1e-8, orth.witness());
  report.add("approach4.matches_stage_zero", against_family.value(), 1e-8,
             against_family.witness());
  return result;
}

}  // namespace blax
