#include "blax/random_pairs.hpp"

namespace blax {

CMatrix random_complex_matrix(std::mt19937_64& rng, Eigen::Index rows,
                              Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      M(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return M;
}

OutputPair random_pair(std::mt19937_64& rng, int d, int p, int n, double rho) {
  CMatrix A = random_complex_matrix(rng, d, d);
  const double r = spectral_radius(A);
  A *= rho / std::max(r, 1e-12);
  CMatrix C = random_complex_matrix(rng, p, d);
  return OutputPair(std::move(A), std::move(C), n);
}

std::vector<OutputPair> random_pairs(std::uint64_t seed, int count,
                                     const RandomPairRanges& ranges) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist_d(1, ranges.max_d);
  std::uniform_int_distribution<int> dist_p(1, ranges.max_p);
  std::uniform_int_distribution<int> dist_n(1, ranges.max_n);
  std::uniform_real_distribution<double> dist_rho(ranges.rho_min, ranges.rho_max);
  std::vector<OutputPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int d = dist_d(rng);
    const int p = dist_p(rng);
    const int n = dist_n(rng);
    const double rho = dist_rho(rng);
    out.push_back(random_pair(rng, d, p, n, rho));
  }
  return out;
}

}  // namespace blax
