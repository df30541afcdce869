#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blax/errors.hpp"

namespace blax {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;

namespace internal {

template <typename Scalar>
Scalar unit_phase_conj(const Scalar& x) {
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    const auto r = std::abs(x);
    return r == 0 ? Scalar(1) : std::conj(x) / r;
  } else {
    return x < 0 ? Scalar(-1) : Scalar(1);
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& M, const char* who) {
  if (M.rows() != M.cols()) {
    throw DimensionError(std::string(who) + ": matrix is " +
                         std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", expected square");
  }
}

}  // namespace internal

/// Integer power by repeated squaring; negative exponents invert.
template <typename Scalar>
Scalar ipow(Scalar x, int e) {
  if (e < 0) return Scalar(1) / ipow(x, -e);
  Scalar out(1);
  while (e > 0) {
    if (e & 1) out *= x;
    x *= x;
    e >>= 1;
  }
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& M) {
  return M.allFinite();
}

/// Largest eigenvalue modulus of a square matrix.
template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& M) {
  internal::require_square(M, "spectral_radius");
  if (M.rows() == 0) return 0.0;
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  Eigen::ComplexEigenSolver<Matrix<std::complex<Real>>> solver(
      M.template cast<std::complex<Real>>(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw InternalConsistencyError("spectral_radius: eigenvalue iteration failed");
  }
  return static_cast<double>(solver.eigenvalues().cwiseAbs().maxCoeff());
}

/// Hermitian part (M + M*) / 2.
template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_part(
    const Eigen::MatrixBase<Derived>& M) {
  return (M + M.adjoint()) / 2;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& M, double tol = 1e-12) {
  if (M.rows() != M.cols()) return false;
  return (M - M.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Eigenvalues of the Hermitian part, ascending.
template <typename Derived>
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& M) {
  internal::require_square(M, "hermitian_eigenvalues");
  if (M.rows() == 0) return Eigen::VectorXd();
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hermitian_part(M),
                                                       Eigen::EigenvaluesOnly);
  return solver.eigenvalues().template cast<double>();
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0) return 0.0;
  return hermitian_eigenvalues(M).minCoeff();
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue modulus).
template <typename Derived>
double hermitian_norm(const Eigen::MatrixBase<Derived>& M) {
  if (M.rows() == 0) return 0.0;
  return hermitian_eigenvalues(M).cwiseAbs().maxCoeff();
}

/// Outcome of a semidefiniteness test. Values inside the band
/// [-10 tol, -tol) are too close to call and are reported as Indeterminate.
enum class Verdict { Fail, Indeterminate, Pass };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

/// M >= 0 with threshold -tol * ||M||.
template <typename Derived>
Verdict psd_verdict(const Eigen::MatrixBase<Derived>& M, double tol = 1e-10) {
  if (M.rows() == 0) return Verdict::Pass;
  const Eigen::VectorXd ev = hermitian_eigenvalues(M);
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  const double lo = ev.minCoeff() / scale;
  if (lo >= -tol) return Verdict::Pass;
  if (lo < -10 * tol) return Verdict::Fail;
  return Verdict::Indeterminate;
}

/// Factor a Hermitian positive semidefinite M as V V* with V of full column
/// rank. Columns follow descending eigenvalue order and the largest-magnitude
/// entry of each column is real and positive. A negative rank_tol selects the
/// default 1e-10 * ||M||_F.
template <typename Derived>
Matrix<typename Derived::Scalar> psd_factor(const Eigen::MatrixBase<Derived>& M,
                                            double rank_tol = -1.0) {
  using Scalar = typename Derived::Scalar;
  internal::require_square(M, "psd_factor");
  if (!M.allFinite()) throw DomainError("psd_factor: non-finite entry");
  const Eigen::Index d = M.rows();
  if (rank_tol < 0) rank_tol = 1e-10 * static_cast<double>(M.norm());
  if (d == 0) return Matrix<Scalar>(0, 0);

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hermitian_part(M));
  if (solver.info() != Eigen::Success) {
    throw InternalConsistencyError("psd_factor: eigensolver failed");
  }
  const auto& lambda = solver.eigenvalues();
  const double lambda_min = static_cast<double>(lambda.minCoeff());
  if (lambda_min < -rank_tol) {
    throw NotPsdError("psd_factor: eigenvalue " + std::to_string(lambda_min) +
                          " below -rank_tol " + std::to_string(rank_tol),
                      lambda_min);
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (static_cast<double>(lambda(i)) > rank_tol) kept.push_back(i);
  }
  Matrix<Scalar> V(d, static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    const Eigen::Index i = kept[static_cast<std::size_t>(c)];
    auto column = solver.eigenvectors().col(i);
    Eigen::Index arg = 0;
    column.cwiseAbs().maxCoeff(&arg);
    V.col(c) = column * internal::unit_phase_conj(column(arg)) *
               Scalar(std::sqrt(lambda(i)));
    // The pivot entry is real after the phase rotation; drop rounding residue.
    V(arg, c) = Scalar(std::abs(V(arg, c)));
  }
  return V;
}

/// Hermitian square root of a positive semidefinite matrix. Eigenvalues in
/// [-tol, 0) are clamped to zero; below that NotPsdError is raised.
template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_sqrt(
    const Eigen::MatrixBase<Derived>& M, double tol = -1.0) {
  using Scalar = typename Derived::Scalar;
  internal::require_square(M, "hermitian_sqrt");
  if (M.rows() == 0) return Matrix<Scalar>(0, 0);
  if (tol < 0) tol = 1e-10 * static_cast<double>(M.norm());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hermitian_part(M));
  Eigen::VectorXd lambda = solver.eigenvalues().template cast<double>();
  if (lambda.minCoeff() < -tol) {
    throw NotPsdError("hermitian_sqrt: matrix is not positive semidefinite",
                      lambda.minCoeff());
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const auto& U = solver.eigenvectors();
  return U * lambda.template cast<Scalar>().asDiagonal() * U.adjoint();
}

/// Inverse Hermitian square root of a positive definite matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_inv_sqrt(
    const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  internal::require_square(M, "hermitian_inv_sqrt");
  if (M.rows() == 0) return Matrix<Scalar>(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hermitian_part(M));
  const Eigen::VectorXd lambda = solver.eigenvalues().template cast<double>();
  if (lambda.minCoeff() <= 0) {
    throw SingularityError("hermitian_inv_sqrt: matrix is not positive definite",
                           std::numeric_limits<double>::infinity());
  }
  const auto& U = solver.eigenvectors();
  return U * lambda.cwiseSqrt().cwiseInverse().template cast<Scalar>().asDiagonal() *
         U.adjoint();
}

namespace internal {

// Eigen's rcond estimate is not reliable for an exactly zero pivot, so zero
// pivots are reported as singular before it is consulted.
template <typename Lu>
double lu_condition(const Lu& lu) {
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const double rcond = static_cast<double>(lu.rcond());
  return rcond > 0 && std::isfinite(rcond) ? 1.0 / rcond
                                           : std::numeric_limits<double>::infinity();
}

}  // namespace internal

/// Condition estimate used by solve_linear; a singular matrix reports +inf.
template <typename Derived>
double condition_estimate(const Eigen::MatrixBase<Derived>& A) {
  internal::require_square(A, "condition_estimate");
  if (A.rows() == 0) return 1.0;
  return internal::lu_condition(
      Eigen::PartialPivLU<Matrix<typename Derived::Scalar>>(A));
}

/// Solve A X = B. Raises SingularityError when the condition estimate of A
/// reaches max_condition.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> solve_linear(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
    double max_condition = 1e12) {
  using Scalar = typename DerivedA::Scalar;
  internal::require_square(A, "solve_linear");
  if (A.rows() != B.rows()) {
    throw DimensionError("solve_linear: A has " + std::to_string(A.rows()) +
                         " rows but B has " + std::to_string(B.rows()));
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw DomainError("solve_linear: non-finite entry");
  }
  if (A.rows() == 0) return Matrix<Scalar>(0, B.cols());
  Eigen::PartialPivLU<Matrix<Scalar>> lu(A);
  const double cond = internal::lu_condition(lu);
  if (!(cond < max_condition)) {
    throw SingularityError("solve_linear: condition estimate " +
                               std::to_string(cond) + " too large",
                           cond);
  }
  Matrix<Scalar> X = lu.solve(B);
  // One step of iterative refinement keeps the residual at the 1e-10 level
  // for moderately conditioned systems.
  const Matrix<Scalar> R = B - A * X;
  X += lu.solve(R);
  return X;
}

/// Inverse of a Hermitian positive definite matrix, symmetrized.
template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_inverse(
    const Eigen::MatrixBase<Derived>& A, double max_condition = 1e12) {
  using Scalar = typename Derived::Scalar;
  const auto I = Matrix<Scalar>::Identity(A.rows(), A.cols());
  return hermitian_part(solve_linear(A, I, max_condition));
}

/// Block-diagonal assembly diag(X, Y).
template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> block_diag(const Eigen::MatrixBase<DerivedX>& X,
                                             const Eigen::MatrixBase<DerivedY>& Y) {
  Matrix<typename DerivedX::Scalar> out =
      Matrix<typename DerivedX::Scalar>::Zero(X.rows() + Y.rows(),
                                              X.cols() + Y.cols());
  out.topLeftCorner(X.rows(), X.cols()) = X;
  out.bottomRightCorner(Y.rows(), Y.cols()) = Y;
  return out;
}

/// Orthonormal basis for the column span of M, using rank tolerance
/// rel_tol relative to the largest singular value.
CMatrix orthonormal_basis(const CMatrix& M, double rel_tol = 1e-12);

/// Largest principal angle sine between the column spans of two matrices,
/// equal to the spectral norm of the difference of orthogonal projectors.
double subspace_gap(const CMatrix& X, const CMatrix& Y, double rel_tol = 1e-12);

/// Spectral norm (largest singular value).
double spectral_norm(const CMatrix& M);

}  // namespace blax
