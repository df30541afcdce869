#pragma once

#include <vector>

#include "blax/bergman.hpp"
#include "blax/corelinalg.hpp"
#include "blax/report.hpp"
#include "blax/statespace.hpp"

namespace blax {

/// Matrix-valued Taylor coefficients c_0..c_N of a truncated power series.
struct TaylorTable {
  std::vector<CMatrix> coeffs;

  int N() const { return static_cast<int>(coeffs.size()) - 1; }
  Eigen::Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
  Eigen::Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }

  /// Throws DimensionError if the coefficients differ in shape.
  void validate() const;
  /// Horner evaluation of the truncated series.
  CMatrix evaluate(Complex z) const;
};

/// binom(k+n-1, k) D_k + z C R_{n,k+1}(zA) B_k. Requires |z| <= 0.9.
CMatrix theta_stage(const OutputPair& pair, const StageColligation& stage,
                    Complex z);

/// Taylor coefficients of theta_stage through z^N.
TaylorTable theta_taylor(const OutputPair& pair, const StageColligation& stage,
                         int N);

struct InnerFamily {
  OutputPair pair;
  std::vector<StageColligation> stages;  ///< k = 0..K
  std::vector<TaylorTable> thetas;       ///< truncated at N
  GramianSet grams;                      ///< shifted gramians for k = 0..K+1
};

/// Stage k from the Cholesky defect of the weighted colligation.
StageColligation inner_stage(const OutputPair& pair, const GramianSet& grams,
                             int k);

/// Stages 0..K for an exactly observable stable pair, each verified against
/// the weighted metric constraints.
InnerFamily build_inner_family(const OutputPair& pair, int K, int N = 256);

/// Orthogonality, isometry and kernel checks on the family.
Report verify_inner_family(const InnerFamily& fam,
                           const std::vector<GridPoint>& grid, int N);

/// Gram matrix in A_n of the columns of S^k Theta_{n,k}, k = 0..K, at
/// truncation N. The identity for a Bergman-inner family.
CMatrix inner_family_gram(const InnerFamily& fam, int N);

/// Defect kernel of a stage: the amount by which the stage fails the
/// weighted coisometry, seen through the kernel identity.
CMatrix defect_kernel(const OutputPair& pair, const StageColligation& stage,
                      const GramianSet& grams, Complex z, Complex zeta);

/// Partially isometric multiplier family F_1..F_n with the data that
/// produced it.
struct MultiplierFamily {
  int n = 1;
  CMatrix A;
  CMatrix C;
  std::vector<CMatrix> plain;           ///< G_0..G_n
  std::vector<CMatrix> plain_sqrt;      ///< G_m^{1/2}
  std::vector<CMatrix> plain_inv_sqrt;  ///< G_m^{-1/2}, m >= 1
  std::vector<CMatrix> B;               ///< index j-1 holds B_j
  std::vector<CMatrix> D;               ///< index j-1 holds D_j
  std::vector<TaylorTable> F;           ///< index l-1 holds F_l

  /// Psi_j(z) for j = 1..n.
  CMatrix psi(int j, Complex z) const;
  /// F_l(z) for l = 1..n.
  CMatrix f(int l, Complex z) const;
};

struct Approach1Result {
  MultiplierFamily family;
  Report report;
};

/// Builds Psi_1 from a unitary completion, Psi_2..Psi_n from Hermitian
/// square roots, and the multipliers F_l; verifies the kernel identities on
/// the grid.
Approach1Result approach1_build(const OutputPair& pair,
                                const std::vector<GridPoint>& grid,
                                int N = 256);

/// Largest singular value of the truncated weighted multiplication matrix
/// of theta on A_n, checked against 1 + 1e-8.
Report approach2_predicate(const TaylorTable& theta, int n, int N);

/// Taylor table of b_alpha(z) = (z - alpha) / (1 - z conj(alpha)).
TaylorTable blaschke_taylor(Complex alpha, int N);

/// Contractivity of b_alpha and the gap between b_alpha times polynomials of
/// degree < N and polynomials of degree <= N vanishing at alpha.
Report approach2_onezero_instance(Complex alpha, int n, int N);

struct Approach4Result {
  StageColligation stage;
  TaylorTable theta;
  Report report;
};

/// Theta(z) = D + z C sum_{j=1}^n (I - zA)^{-j} B for the wandering subspace.
CMatrix approach4_evaluate(const OutputPair& pair, const StageColligation& stage,
                           Complex z);

Approach4Result approach4_build(const OutputPair& pair,
                                const std::vector<GridPoint>& grid,
                                int N = 256);

}  // namespace blax
