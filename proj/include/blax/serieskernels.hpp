#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "blax/corelinalg.hpp"
#include "blax/report.hpp"

namespace blax {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact binomial coefficient binom(m, r). Zero for r < 0 or 0 <= m < r.
/// For m < 0 the generalized value (-1)^r binom(r - m - 1, r) is returned,
/// so binom(-1, 0) = 1.
BigInt binomial(long m, long r);

/// binomial(m, r) rounded to double.
double binomial_value(long m, long r);

/// Weight mu_{n,j} = 1 / binom(j + n - 1, j).
Rational mu(int n, int j);
double mu_value(int n, int j);

/// Shifted resolvent index pair: R_{n,k}(z) is the k-fold backward shift
/// of (1 - z)^{-n}.
struct SeriesSpec {
  int n = 1;
  int k = 0;

  SeriesSpec() = default;
  SeriesSpec(int n_in, int k_in);
};

/// j-th Taylor coefficient binom(n + j + k - 1, j + k) of R_{n,k}.
BigInt r_coeff(const SeriesSpec& spec, int j);

/// Integer coefficients c_0..c_{n-1} with
/// R_{n,k}(z) = (1 - z)^{-n} * sum_q c_q z^q.
std::vector<BigInt> shift_polynomial(int n, int k);

/// Closed-form value of R_{n,k}(z). Requires |z| <= 1 - 1e-9.
Complex r_eval(const SeriesSpec& spec, Complex z);

/// Partial sum of the Taylor series through z^N.
Complex r_eval_truncated(const SeriesSpec& spec, Complex z, int N);

/// z^{-k} (R_n(z) - sum_{j<k} binom(n + j - 1, j) z^j); requires z != 0.
Complex r_eval_shifted_difference(const SeriesSpec& spec, Complex z);

/// R_{n,k}(zA) for a square matrix A with spectral radius of zA below one,
/// via the polynomial-times-resolvent closed form.
CMatrix shifted_resolvent(const CMatrix& A, int n, int k, Complex z);

/// R_{n,k}(zA) assembled from unshifted resolvents:
/// sum_{l=1}^n binom(l + k - 2, l - 1) R_{n-l+1}(zA), valid for k >= 1.
CMatrix shifted_resolvent_by_combination(const CMatrix& A, int n, int k,
                                         Complex z);

/// Sample points used by default: moduli {0, 0.3, 0.5, 0.7, 0.9} at
/// phases pi/7 + m pi/2, m = 0..3.
std::vector<Complex> default_sample_points();

/// Checks the binomial and series identities for shifts k <= k_max and
/// orders j <= N at each sample point. Every sample must satisfy |z| <= 0.9.
Report verify_series_identities(int n, int k_max, int N,
                                const std::vector<Complex>& sample_z);

}  // namespace blax
