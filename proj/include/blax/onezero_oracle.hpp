#pragma once

#include <vector>

#include "blax/bergman.hpp"
#include "blax/corelinalg.hpp"
#include "blax/report.hpp"

// Closed forms for the subspace of A_n functions vanishing at alpha. Nothing
// here calls the generic gramian or theta code.

namespace blax {

struct OneZeroSpec {
  Complex alpha{0.5, 0.0};
  int n = 2;

  /// Throws DomainError unless 1e-6 < |alpha| < 1 - 1e-6 and n >= 1.
  void validate() const;
};

/// Every closed-form quantity of the one-zero example for stages 0..K.
class OneZeroOracle {
 public:
  OneZeroOracle(const OneZeroSpec& spec, int K);

  const OneZeroSpec& spec() const { return spec_; }
  int K() const { return K_; }

  Complex A() const { return std::conj(spec_.alpha); }
  double C() const { return c_; }
  /// G_j = (1 - |alpha|^2)^{n-j}, j = 0..n.
  const std::vector<double>& plain() const { return plain_; }
  /// Shifted gramians k = 0..K+1 from the R_{n,k} form (primary).
  const std::vector<double>& shifted() const { return shifted_r_; }
  /// Shifted gramians k = 0..K+1 from the power-sum form (cross-check).
  const std::vector<double>& shifted_power_sum() const { return shifted_sum_; }
  /// Largest relative gap between the two shifted-gramian forms.
  double shifted_discrepancy() const { return discrepancy_; }
  bool shifted_forms_agree() const { return discrepancy_ <= 1e-12; }

  /// B_k, D_k for k = 0..K with D_k > 0.
  const std::vector<Complex>& B() const { return B_; }
  const std::vector<double>& D() const { return D_; }

  Complex blaschke(Complex z) const;
  /// R_{n,k}(x) by the finite combination of powers of 1/(1-x).
  Complex r_closed(int k, Complex x) const;
  /// R_{n,k}(x) by direct summation of its Taylor series; |x| < 1.
  Complex r_series(int k, Complex x) const;

  /// Theta_{n,k} as the difference of two R_{n,k} values.
  Complex theta(int k, Complex z) const;
  /// Theta_{n,k} with the Blaschke factor pulled out on the left.
  Complex theta_factored(int k, Complex z) const;
  /// Theta_{n,0} in its geometric-sum form.
  Complex theta0(Complex z) const;

  /// F_l(z) = b_alpha(z) (sqrt(1 - |alpha|^2) / (1 - z conj(alpha)))^{n-l}.
  Complex F(int l, Complex z) const;
  Complex kM(Complex z, Complex zeta) const;

  /// Agreement of the redundant closed forms with each other.
  Report self_checks(const std::vector<GridPoint>& grid) const;

 private:
  double mu(int k) const;

  OneZeroSpec spec_;
  int K_;
  double w_;  // 1 - |alpha|^2
  double c_;
  std::vector<double> plain_;
  std::vector<double> shifted_r_;
  std::vector<double> shifted_sum_;
  double discrepancy_ = 0.0;
  std::vector<Complex> B_;
  std::vector<double> D_;
};

OneZeroOracle oracle_all(const OneZeroSpec& spec, int K);

/// Runs the generic gramian, inner-family, Approach 1 and Approach 4
/// pipelines on the one-zero pair and compares them with the oracle.
Report oracle_vs_pipeline(const OneZeroSpec& spec, int K,
                          const std::vector<GridPoint>& grid, int N = 256);

}  // namespace blax
