#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blax/corelinalg.hpp"
#include "blax/report.hpp"
#include "blax/serieskernels.hpp"
#include "blax/statespace.hpp"

namespace blax {

/// Truncated element of the weighted Bergman space A_n(Y). Column j of
/// coeffs is the Taylor coefficient f_j, j = 0..N.
struct BergmanElement {
  int n = 1;
  CMatrix coeffs;

  BergmanElement() = default;
  BergmanElement(int n_in, CMatrix coeffs_in);

  int N() const { return static_cast<int>(coeffs.cols()) - 1; }
  Eigen::Index p() const { return coeffs.rows(); }
};

/// Weighted inner product sum_j mu_{n,j} <f_j, g_j>, linear in f.
Complex bergman_inner(const BergmanElement& f, const BergmanElement& g);
double bergman_norm_squared(const BergmanElement& f);

/// Multiplication by z; the coefficient of z^{N+1} is dropped.
BergmanElement shift_apply(const BergmanElement& f);
/// Adjoint of the shift in the weighted inner product.
BergmanElement shift_adjoint_apply(const BergmanElement& f);
/// k-fold adjoint shift computed in one pass from the weight ratios.
BergmanElement shift_adjoint_power(const BergmanElement& f, int k);

/// Coefficients binom(n+j+k-1, j+k) C A^j x for j = 0..N.
BergmanElement observability_apply(const OutputPair& pair, int k,
                                   const CVector& x, int N);

/// Model pair (E, S_n*) on polynomials of degree <= N with values in C^p,
/// written in coordinates orthonormal for the weighted norm.
OutputPair model_pair(int n, int p, int N);

/// mu_{n,j} / mu_{n,j+k}.
Rational model_shifted_gramian_diag(int n, int k, int j);

/// Relations between the shift, its adjoint, its Cauchy dual and the
/// shifted observability operators, checked on seeded random pairs.
Report cauchy_dual_checks(int n, int k_max, int N, std::uint64_t seed = 7);
/// Same relations for a caller-supplied pair.
Report cauchy_dual_checks(const OutputPair& pair, int k_max, int N);

struct GridPoint {
  Complex z;
  Complex zeta;
};

struct KernelGrid {
  std::vector<GridPoint> points;
  std::vector<CMatrix> values;
};

/// Tensor grid of default_sample_points() with itself (400 pairs).
std::vector<GridPoint> default_grid();

enum class KernelKind {
  kObservability,    ///< C R_n(zA) H R_n(zeta A)* C*
  kSubspace,         ///< reproducing kernel of M = (Ran O)^perp
  kShiftedRange,     ///< z^k conj(zeta)^k C R_{n,k} G_k^{-1} R_{n,k}* C*
  kShiftedSubspace,  ///< reproducing kernel of S^k M
  kDifference,       ///< kernel of S^k M minus S^{k+1} M
  kWandering,        ///< kernel of M minus S M by resolvent powers
};

const char* to_string(KernelKind kind);

/// Closed-form kernel of the requested kind on a grid. H is used only for
/// kObservability; k only for the shifted kinds.
KernelGrid kernel_eval(KernelKind kind, const OutputPair& pair,
                       const GramianSet& grams, const CMatrix* H, int k,
                       const std::vector<GridPoint>& grid);

/// Largest ||K(z,zeta) - K(zeta,z)*|| over pairs of swapped grid points.
double hermitian_symmetry_defect(const KernelGrid& grid);

/// Compares the orthocomplement of S^k M with polynomials of degree < k plus
/// S^k Ran O_{n,k} on polynomials of degree <= N.
Report smperp_decomposition_check(const OutputPair& pair, int k, int N);

std::string format_point(const GridPoint& pt);

}  // namespace blax
