#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "blax/statespace.hpp"

namespace blax {

/// Complex matrix with independent standard complex Gaussian entries.
CMatrix random_complex_matrix(std::mt19937_64& rng, Eigen::Index rows,
                              Eigen::Index cols);

/// Random pair with A rescaled to spectral radius rho.
OutputPair random_pair(std::mt19937_64& rng, int d, int p, int n, double rho);

struct RandomPairRanges {
  int max_d = 4;
  int max_p = 3;
  int max_n = 4;
  double rho_min = 0.6;
  double rho_max = 0.9;
};

/// Deterministic sequence of random pairs with dimensions drawn uniformly
/// from the given ranges and spectral radius in [rho_min, rho_max].
std::vector<OutputPair> random_pairs(std::uint64_t seed, int count,
                                     const RandomPairRanges& ranges = {});

}  // namespace blax
