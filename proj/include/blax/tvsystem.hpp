#pragma once

#include <vector>

#include "blax/beurlinglax.hpp"
#include "blax/corelinalg.hpp"
#include "blax/report.hpp"
#include "blax/statespace.hpp"

namespace blax {

/// Time-varying system with shared (C, A) and stage data (B_k, D_k),
/// k = 0..K.
struct SystemSpec {
  OutputPair pair;
  std::vector<StageColligation> stages;

  int n() const { return pair.n; }
  int K() const { return static_cast<int>(stages.size()) - 1; }

  /// Throws DimensionError on shape mismatch and DomainError unless the
  /// stage indices run 0, 1, ..., K.
  void validate() const;
};

SystemSpec system_from_family(const InnerFamily& fam);

struct SignalTrace {
  std::vector<CVector> inputs;   ///< u(0..T)
  std::vector<CVector> states;   ///< x(0..T+1)
  std::vector<CVector> outputs;  ///< y(0..T)

  int T() const { return static_cast<int>(outputs.size()) - 1; }
};

/// Runs the recursion
///   x(j+1) = ((j+n)/(j+1)) A x(j) + binom(j+n, j+1) B_j u(j)
///   y(j)   = C x(j) + binom(j+n-1, j) D_j u(j)
/// for j = 0..T. inputs[j] is u(j); missing trailing inputs are zero. A
/// nonzero input at a step without a stage raises DomainError naming the
/// step, as does any size mismatch.
SignalTrace simulate(const SystemSpec& spec, const CVector& x0,
                     const std::vector<CVector>& inputs, int T);

/// Same trajectory from the explicit binomial-weighted sums.
SignalTrace closed_form_trace(const SystemSpec& spec, const CVector& x0,
                              const std::vector<CVector>& inputs, int T);

/// Largest relative difference between matching entries of two traces.
double trace_difference(const SignalTrace& a, const SignalTrace& b);

/// Simulated outputs y(0..N) against the Taylor coefficients of
/// O x0 + sum_k z^k Theta_k u(k).
Report ztransform_reconcile(const SystemSpec& spec, const CVector& x0,
                            const std::vector<CVector>& inputs, int N);

/// Energy balance ||y_hat||^2 = <G x0, x0> + sum ||u(k)||^2 and pairwise
/// orthogonality of the summands of y_hat, at truncation N.
Report energy_audit(const SystemSpec& spec, const CVector& x0,
                    const std::vector<CVector>& inputs, int N);

/// U_k^* diag(G_{k+1}, b_k I) U_k - diag(G_k, I) with b_k = binom(n+k-1, k)
/// and G the shifted gramians.
CMatrix colligation_isometry_defect(const OutputPair& pair,
                                    const StageColligation& stage,
                                    const GramianSet& grams);

/// U_k diag(G_k^{-1}, I) U_k^* - diag(G_{k+1}^{-1}, b_k^{-1} I).
CMatrix colligation_coisometry_defect(const OutputPair& pair,
                                      const StageColligation& stage,
                                      const GramianSet& grams);

/// The rescaled colligation of one simulation step at time k.
CMatrix tweaked_colligation(const OutputPair& pair, const StageColligation& stage);

/// Weighted unitarity of every stage, and agreement of the rescaled
/// colligation with both the diagonal rescaling and one simulation step.
Report weighted_colligation_audit(const SystemSpec& spec, const GramianSet& grams);

}  // namespace blax
