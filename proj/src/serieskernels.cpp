#include "blax/serieskernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace blax {
namespace {

std::string point_label(Complex z) {
  std::ostringstream os;
  os.precision(4);
  os << "z=(" << z.real() << "," << z.imag() << ")";
  return os.str();
}

double rel_residual(Complex lhs, Complex rhs) {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

void require_in_disk(Complex z, double margin, const char* who) {
  if (!(std::abs(z) <= 1.0 - margin)) {
    std::ostringstream os;
    os << who << ": |z| = " << std::abs(z) << " exceeds 1 - " << margin;
    throw DomainError(os.str());
  }
}

CMatrix resolvent(const CMatrix& A, Complex z) {
  const CMatrix I = CMatrix::Identity(A.rows(), A.cols());
  return solve_linear(CMatrix(I - z * A), I);
}

CMatrix matrix_power(const CMatrix& X, int e) {
  CMatrix out = CMatrix::Identity(X.rows(), X.cols());
  for (int i = 0; i < e; ++i) out = out * X;
  return out;
}

}  // namespace

BigInt binomial(long m, long r) {
  if (r < 0) return 0;
  if (r == 0) return 1;
  if (m < 0) {
    BigInt v = binomial(r - m - 1, r);
    return (r % 2 == 0) ? v : BigInt(-v);
  }
  if (m < r) return 0;
  if (r > m - r) r = m - r;
  BigInt out = 1;
  for (long i = 1; i <= r; ++i) {
    out *= (m - r + i);
    out /= i;
  }
  return out;
}

double binomial_value(long m, long r) {
  return binomial(m, r).convert_to<double>();
}

Rational mu(int n, int j) {
  if (n < 1 || j < 0) throw DomainError("mu: requires n >= 1 and j >= 0");
  return Rational(BigInt(1), binomial(j + n - 1, j));
}

double mu_value(int n, int j) { return mu(n, j).convert_to<double>(); }

SeriesSpec::SeriesSpec(int n_in, int k_in) : n(n_in), k(k_in) {
  if (n < 1) throw DomainError("SeriesSpec: n must be >= 1");
  if (k < 0) throw DomainError("SeriesSpec: k must be >= 0");
}

BigInt r_coeff(const SeriesSpec& spec, int j) {
  if (j < 0) throw DomainError("r_coeff: j must be >= 0");
  return binomial(spec.n + j + spec.k - 1, j + spec.k);
}

std::vector<BigInt> shift_polynomial(int n, int k) {
  SeriesSpec check(n, k);
  (void)check;
  std::vector<BigInt> c(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    BigInt acc = 0;
    for (int j = 0; j <= q; ++j) {
      BigInt term = binomial(n + k - 1, k + j) * binomial(n - 1 - j, q - j);
      if ((q - j) % 2 == 0) {
        acc += term;
      } else {
        acc -= term;
      }
    }
    c[static_cast<std::size_t>(q)] = acc;
  }
  return c;
}

Complex r_eval(const SeriesSpec& spec, Complex z) {
  require_in_disk(z, 1e-9, "r_eval");
  if (z == Complex(0.0)) return binomial_value(spec.n + spec.k - 1, spec.k);
  const Complex rn = ipow(Complex(1.0) - z, -spec.n);
  if (spec.k == 0) return rn;
  const std::vector<BigInt> c = shift_polynomial(spec.n, spec.k);
  Complex poly = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    poly = poly * z + it->convert_to<double>();
  }
  return rn * poly;
}

Complex r_eval_truncated(const SeriesSpec& spec, Complex z, int N) {
  Complex sum = 0.0;
  Complex power = 1.0;
  for (int j = 0; j <= N; ++j) {
    sum += r_coeff(spec, j).convert_to<double>() * power;
    power *= z;
  }
  return sum;
}

Complex r_eval_shifted_difference(const SeriesSpec& spec, Complex z) {
  require_in_disk(z, 1e-9, "r_eval_shifted_difference");
  if (z == Complex(0.0)) {
    throw DomainError("r_eval_shifted_difference: undefined at z = 0");
  }
  Complex head = 0.0;
  Complex power = 1.0;
  for (int j = 0; j < spec.k; ++j) {
    head += binomial_value(spec.n + j - 1, j) * power;
    power *= z;
  }
  return (ipow(Complex(1.0) - z, -spec.n) - head) / power;
}

CMatrix shifted_resolvent(const CMatrix& A, int n, int k, Complex z) {
  internal::require_square(A, "shifted_resolvent");
  const CMatrix Rn = matrix_power(resolvent(A, z), n);
  if (k == 0) return Rn;
  const std::vector<BigInt> c = shift_polynomial(n, k);
  const CMatrix zA = z * A;
  CMatrix poly = CMatrix::Zero(A.rows(), A.cols());
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    poly = poly * zA;
    poly.diagonal().array() += it->convert_to<double>();
  }
  return Rn * poly;
}

CMatrix shifted_resolvent_by_combination(const CMatrix& A, int n, int k,
                                         Complex z) {
  if (k < 1) throw DomainError("shifted_resolvent_by_combination: needs k >= 1");
  const CMatrix R1 = resolvent(A, z);
  CMatrix out = CMatrix::Zero(A.rows(), A.cols());
  CMatrix power = R1;
  // power holds R_m(zA) for m = 1..n; the weight of R_m is
  // binom(n - m + k - 1, n - m).
  for (int m = 1; m <= n; ++m) {
    const int l = n - m + 1;
    out += binomial_value(l + k - 2, l - 1) * power;
    power = power * R1;
  }
  return out;
}

std::vector<Complex> default_sample_points() {
  std::vector<Complex> out;
  for (double r : {0.0, 0.3, 0.5, 0.7, 0.9}) {
    for (int m = 0; m < 4; ++m) {
      out.push_back(std::polar(r, std::numbers::pi / 7 + m * std::numbers::pi / 2));
    }
  }
  return out;
}

Report verify_series_identities(int n, int k_max, int N,
                                const std::vector<Complex>& sample_z) {
  if (k_max < 0 || N < 0) {
    throw DomainError("verify_series_identities: k_max and N must be >= 0");
  }
  for (Complex z : sample_z) require_in_disk(z, 0.1 - 1e-12, "verify_series_identities");

  Report report;

  // Integer identity: binom(n+j+k-1, j+k) = sum_l binom(l+k-2, l-1) binom(n+j-l, j).
  {
    std::string witness;
    bool ok = true;
    for (int k = 0; k <= k_max && ok; ++k) {
      for (int j = 0; j <= N && ok; ++j) {
        BigInt rhs = 0;
        for (int l = 1; l <= n; ++l) {
          rhs += binomial(l + k - 2, l - 1) * binomial(n + j - l, j);
        }
        if (rhs != binomial(n + j + k - 1, j + k)) {
          ok = false;
          witness = "k=" + std::to_string(k) + " j=" + std::to_string(j);
        }
      }
    }
    report.add("series.chu_vandermonde", ok ? 0.0 : 1.0, 0.0, witness);
  }

  // Partial sums through z^M against the closed form with tail correction.
  {
    MaxResidual worst;
    for (Complex z : sample_z) {
      const Complex rn = ipow(Complex(1.0) - z, -n);
      Complex partial = 0.0;
      Complex power = 1.0;
      for (int M = 0; M <= N; ++M) {
        partial += binomial_value(n + M - 1, M) * power;
        power *= z;
        Complex tail = 0.0;
        for (int j = 1; j <= n; ++j) {
          tail += binomial_value(M + n, M + j) * ipow(z, M + j) /
                  ipow(Complex(1.0) - z, j);
        }
        const double res = std::abs(partial - (rn - tail)) / std::max(1.0, std::abs(rn));
        worst.observe_lazy(res, [&] { return point_label(z) + " N=" + std::to_string(M); });
      }
    }
    report.add("series.truncated_sum", worst.value(), 1e-10, worst.witness());
  }

  // R_{n,k}(z) = binom(n+k-1, k) + z R_{n,k+1}(z).
  {
    MaxResidual worst;
    for (Complex z : sample_z) {
      for (int k = 0; k <= k_max; ++k) {
        const Complex lhs = r_eval({n, k}, z);
        const Complex rhs = binomial_value(n + k - 1, k) + z * r_eval({n, k + 1}, z);
        worst.observe_lazy(rel_residual(lhs, rhs), [&] {
          return point_label(z) + " k=" + std::to_string(k);
        });
      }
    }
    report.add("series.shift_recursion", worst.value(), 1e-10, worst.witness());
  }

  // R_{n,k} = sum_l binom(l+k-2, l-1) R_{n-l+1} for k >= 1.
  {
    MaxResidual worst;
    for (Complex z : sample_z) {
      for (int k = 1; k <= k_max; ++k) {
        Complex rhs = 0.0;
        for (int l = 1; l <= n; ++l) {
          rhs += binomial_value(l + k - 2, l - 1) * ipow(Complex(1.0) - z, -(n - l + 1));
        }
        worst.observe_lazy(rel_residual(r_eval({n, k}, z), rhs), [&] {
          return point_label(z) + " k=" + std::to_string(k);
        });
      }
    }
    report.add("series.combination", worst.value(), 1e-10, worst.witness());
  }

  // Closed form against the defining shifted difference.
  {
    MaxResidual worst;
    for (Complex z : sample_z) {
      if (z == Complex(0.0)) continue;
      for (int k = 0; k <= k_max; ++k) {
        worst.observe_lazy(
            rel_residual(r_eval({n, k}, z), r_eval_shifted_difference({n, k}, z)),
            [&] { return point_label(z) + " k=" + std::to_string(k); });
      }
    }
    report.add("series.closed_form_vs_difference", worst.value(), 1e-10,
               worst.witness());
  }

  return report;
}

}  // namespace blax
