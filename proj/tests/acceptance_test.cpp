// Acceptance criteria 1-8 and the verify-all wall time. Prints one PASS or
// FAIL line per criterion and exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "blax/verify_suite.hpp"

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr int kN = 256;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_failures(const blax::Report& r) {
  for (const blax::Check& c : r.checks()) {
    if (c.pass) continue;
    std::printf("    failed %s: residual %.3e > tolerance %.3e (%s)\n", c.name.c_str(), c.residual,
                c.tolerance, c.witness.c_str());
  }
}

double worst_ratio(const blax::Report& r) {
  double worst = 0.0;
  for (const blax::Check& c : r.checks()) {
    if (c.tolerance > 0) worst = std::max(worst, c.residual / c.tolerance);
  }
  return worst;
}

// Runs reports, applies the optional time budget and prints the verdict.
bool criterion(int id, const char* title, double budget_s,
               const std::function<std::vector<blax::Report>()>& run) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<blax::Report> reports;
  std::string error;
  try {
    reports = run();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double elapsed = seconds_since(start);
  bool pass = error.empty();
  std::size_t checks = 0;
  double ratio = 0.0;
  for (const blax::Report& r : reports) {
    pass = pass && r.all_pass();
    checks += r.checks().size();
    ratio = std::max(ratio, worst_ratio(r));
  }
  const bool in_time = budget_s <= 0 || elapsed < budget_s;
  std::printf("%s criterion %d (%s): %zu checks, worst residual/tolerance %.2e, %.2f s",
              pass && in_time ? "PASS" : "FAIL", id, title, checks, ratio, elapsed);
  if (budget_s > 0) std::printf(" (budget %.0f s)", budget_s);
  std::printf("\n");
  if (!error.empty()) std::printf("    exception: %s\n", error.c_str());
  if (!in_time) std::printf("    over time budget\n");
  for (const blax::Report& r : reports) print_failures(r);
  return pass && in_time;
}

}  // namespace

int main() {
  bool all = true;
  all &= criterion(1, "series identities", 1.0, [] { return std::vector{blax::criterion_series()}; });
  all &= criterion(2, "gramian consistency", 10.0,
                   [] { return std::vector{blax::criterion_gramians(kSeed)}; });
  all &= criterion(3, "one-zero oracle", 5.0, [] { return std::vector{blax::criterion_onezero()}; });
  all &= criterion(4, "inner-family verification", 30.0,
                   [] { return std::vector{blax::criterion_inner_family(kSeed, kN)}; });
  all &= criterion(5, "simulator reconciliation", 0.0,
                   [] { return std::vector{blax::criterion_simulator(kSeed, kN)}; });
  all &= criterion(6, "classical collapse and boundary modulus", 0.0, [] {
    return std::vector{blax::criterion_classical_collapse(kSeed),
                       blax::criterion_boundary_modulus(kSeed)};
  });
  all &= criterion(7, "Stein uniqueness dichotomy", 0.0,
                   [] { return std::vector{blax::criterion_stein_dichotomy()}; });
  all &= criterion(8, "squeeze lemma", 0.0, [] { return std::vector{blax::criterion_squeeze(kSeed)}; });

  {
    blax::SuiteOptions opts;
    opts.seed = kSeed;
    opts.N = kN;
    opts.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto start = std::chrono::steady_clock::now();
    const blax::Report r = blax::run_verify_all(opts);
    const double elapsed = seconds_since(start);
    const bool pass = r.all_pass() && elapsed < 60.0;
    std::printf("%s verify-all: %zu checks, all pass: %s, %.2f s with %d jobs (budget 60 s)\n",
                pass ? "PASS" : "FAIL", r.checks().size(), r.all_pass() ? "yes" : "no", elapsed,
                opts.jobs);
    print_failures(r);
    all &= pass;
  }
  return all ? 0 : 1;
}
