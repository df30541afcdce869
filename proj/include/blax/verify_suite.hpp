#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blax/report.hpp"

// The invariant suite behind `blax verify-all` and the acceptance binary.
// Every function is deterministic in its seed. Checks repeated over many
// instances are folded into one entry holding the worst residual.

namespace blax {

struct SuiteOptions {
  std::uint64_t seed = 42;
  int jobs = 1;
  int N = 256;
};

// Acceptance criteria.
Report criterion_series();
Report criterion_gramians(std::uint64_t seed);
Report criterion_onezero();
Report criterion_inner_family(std::uint64_t seed, int N);
Report criterion_simulator(std::uint64_t seed, int N);
Report criterion_classical_collapse(std::uint64_t seed);
/// Distance of |Theta| from 1 at |z| = 0.999 for scalar classical instances.
Report criterion_boundary_modulus(std::uint64_t seed);
Report criterion_stein_dichotomy();
Report criterion_squeeze(std::uint64_t seed);

// Module invariants beyond the criteria.
Report invariants_corelinalg(std::uint64_t seed);
Report invariants_bergman(std::uint64_t seed);
Report invariants_beurlinglax(std::uint64_t seed, int N);
Report invariants_tvsystem(std::uint64_t seed);

/// Invariants covered by verify-all, each mapped to the checks that test it.
std::vector<std::string> verify_all_checklist();

/// Runs every criterion except the boundary-modulus one and every module
/// invariant, at most options.jobs at a time. The merged report is sorted
/// by check name and does not depend on jobs.
Report run_verify_all(const SuiteOptions& options);

/// Folds the checks of r into agg under the same names, keeping the worst
/// residual; tag is prefixed to the witness.
void absorb(Report& agg, const Report& r, const std::string& tag);

}  // namespace blax
