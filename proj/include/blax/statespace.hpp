#pragma once

#include <optional>
#include <vector>

#include "blax/corelinalg.hpp"
#include "blax/report.hpp"

namespace blax {

/// Output pair (C, A) with weight index n. A is d x d, C is p x d.
struct OutputPair {
  CMatrix A;
  CMatrix C;
  int n = 1;

  OutputPair() = default;
  OutputPair(CMatrix A_in, CMatrix C_in, int n_in);

  Eigen::Index d() const { return A.rows(); }
  Eigen::Index p() const { return C.rows(); }

  /// Throws DimensionError or DomainError on inconsistent data.
  void validate() const;
};

/// Plain gramians G_0..G_n (G_0 = C*C) and shifted gramians for k = 0..k_max.
struct GramianSet {
  std::vector<CMatrix> plain;
  std::vector<CMatrix> shifted;

  const CMatrix& G(int m) const;
  const CMatrix& shifted_at(int k) const;
  int k_max() const { return static_cast<int>(shifted.size()) - 1; }
};

/// One stage [B_k; D_k] of a weighted colligation; u_k = B.cols().
struct StageColligation {
  int k = 0;
  CMatrix B;
  CMatrix D;

  Eigen::Index u() const { return B.cols(); }
};

/// Inverse of a Hermitian gramian. Throws ObservabilityError unless the
/// gramian is positive definite with condition number below 1e10.
CMatrix checked_gramian_inverse(const CMatrix& G, const char* who);

/// (I - B_A)^n [H] with B_A[X] = A* X A.
CMatrix gamma_map(const CMatrix& A, const CMatrix& H, int n);

/// Unique P with P - A* P A = Q. Requires spectral_radius(A) < 1.
CMatrix stein_solve(const CMatrix& A, const CMatrix& Q);

struct GramianOptions {
  int k_max = 0;
  /// Terms of the defining series used for the cross-check.
  int series_terms = 200;
  double cross_check_tol = 1e-8;
  bool cross_check = true;
};

/// Gramians by Stein recursion and shifted gramians by the closed form in
/// terms of G_n, each cross-checked against the defining series.
GramianSet gramians(const OutputPair& pair, const GramianOptions& options = {});

/// Partial sum through j = terms - 1 of binom(n+j+k-1, j+k) A*^j C*C A^j.
CMatrix gramian_series(const CMatrix& A, const CMatrix& C, int n, int k,
                       int terms);

/// Shifted gramian of order k computed from G_n and A alone.
CMatrix shifted_gramian_from_plain(const CMatrix& A, const CMatrix& Gn, int n,
                                   int k);

struct Classification {
  Verdict contraction_like = Verdict::Fail;  ///< H >= A*HA >= 0
  Verdict stein_inequality = Verdict::Fail;  ///< Gamma_n[H] >= C*C
  bool stein_equality = false;               ///< Gamma_n[H] = C*C
  Verdict n_hypercontractive = Verdict::Fail;
  bool strongly_stable = false;
  bool exactly_observable = false;

  /// Stein equality together with hypercontractivity.
  bool n_isometric() const {
    return stein_equality && n_hypercontractive == Verdict::Pass;
  }
};

Classification classify_pair(const OutputPair& pair, const CMatrix& H);

struct SteinUniquenessReport {
  CMatrix delta;                  ///< lim A*^N A^N
  bool converged = false;
  int iterations = 0;
  bool unique = false;
  CMatrix gramian;                ///< G_{n,C,A} from the output series
  std::optional<CMatrix> second_solution;
  double gramian_residual = 0.0;  ///< Stein system residual of the gramian
  double second_residual = 0.0;   ///< Stein system residual of the second solution
};

/// Decides uniqueness of the positive solution of the Stein equality system
/// for a contraction A. Throws PreconditionError if ||A|| > 1 + 1e-12.
SteinUniquenessReport stein_uniqueness_probe(const OutputPair& pair);

struct SqueezeReport {
  std::vector<double> min_eigenvalues;  ///< Gamma_k[H] for k = 1..n-1
  double threshold = 0.0;               ///< -1e-9 ||H||
  bool holds = false;
};

/// Intermediate positivity of Gamma_k[H]. Throws PreconditionError when the
/// hypotheses fail; a false holds field means the conclusion failed.
SqueezeReport squeeze_check(const CMatrix& A, const CMatrix& H, int n);

/// Residuals of the cross-term, input-isometry and weighted-coisometry
/// constraints of a stage.
Report metric_constraint_check(const OutputPair& pair,
                               const StageColligation& stage,
                               const GramianSet& grams);

}  // namespace blax
