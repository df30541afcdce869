// Command-line front end. Exit status: 0 success, 1 verification failure or
// construction error, 2 malformed input or invalid options.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "blax/beurlinglax.hpp"
#include "blax/bergman.hpp"
#include "blax/io.hpp"
#include "blax/onezero_oracle.hpp"
#include "blax/serieskernels.hpp"
#include "blax/statespace.hpp"
#include "blax/tvsystem.hpp"
#include "blax/verify_suite.hpp"

namespace {

using blax::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitMalformed = 2;

// Thrown for option values that parse but violate a run constraint.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string pair_path;
  std::string spec_path;
  std::string input_path;
  std::string out_path;
  std::string alpha_text = "0.5,0";
  std::string grid_text;
  std::string kernel_csv;
  std::string kernel_kind = "difference";
  std::vector<std::string> tol_overrides;
  int approach = 3;
  int n = 2;
  int N = 256;
  int K = 8;
  int T = 30;
  int kernel_k = 0;
  int jobs = 1;
  std::uint64_t seed = 42;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    blax::io::write_text_file(cfg.out_path, text);
  }
}

void emit_json(const RunConfig& cfg, const Json& j) { emit(cfg, j.dump(2) + "\n"); }

blax::Complex parse_complex(const std::string& text, const std::string& field) {
  std::istringstream is(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(is >> re)) throw blax::ParseError(field, "expected re,im but got '" + text + "'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) {
      throw blax::ParseError(field, "expected re,im but got '" + text + "'");
    }
  }
  std::string rest;
  if (is >> rest) throw blax::ParseError(field, "trailing text in '" + text + "'");
  return {re, im};
}

std::vector<blax::GridPoint> grid_from(const RunConfig& cfg) {
  if (cfg.grid_text.empty()) return blax::default_grid();
  std::vector<blax::Complex> pts;
  std::istringstream is(cfg.grid_text);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    double r = 0.0;
    try {
      std::size_t used = 0;
      r = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw blax::ParseError("--grid", "not a number: '" + cell + "'");
    }
    if (r < 0.0 || r > 0.9) throw blax::ParseError("--grid", "radius must lie in [0, 0.9]");
    for (int m = 0; m < 4; ++m) {
      pts.push_back(std::polar(r, std::numbers::pi / 7 + m * std::numbers::pi / 2));
    }
  }
  if (pts.empty()) throw blax::ParseError("--grid", "no radii given");
  std::vector<blax::GridPoint> grid;
  for (blax::Complex z : pts) {
    for (blax::Complex zeta : pts) grid.push_back({z, zeta});
  }
  return grid;
}

std::map<std::string, double> tolerance_overrides(const RunConfig& cfg) {
  std::map<std::string, double> out;
  for (const std::string& item : cfg.tol_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw blax::ParseError("--tol", "expected NAME=VALUE in '" + item + "'");
    double v = 0.0;
    try {
      v = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw blax::ParseError("--tol", "not a number in '" + item + "'");
    }
    if (!(v > 0.0)) throw blax::ParseError("--tol", "tolerance must be positive in '" + item + "'");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

// Re-judges the named checks against overridden tolerances.
void apply_overrides(blax::Report& report, const std::map<std::string, double>& overrides) {
  for (blax::Check& c : report.checks()) {
    const auto it = overrides.find(c.name);
    if (it == overrides.end()) continue;
    c.tolerance = it->second;
    c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.K < 0) throw UsageError("-K must be >= 0");
  if (cfg.N <= cfg.K + 16) throw UsageError("-N must exceed K + 16");
  if (cfg.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (cfg.T < 0) throw UsageError("-T must be >= 0");
  tolerance_overrides(cfg);
}

blax::OutputPair load_pair(const RunConfig& cfg) {
  if (cfg.pair_path.empty()) throw UsageError("--pair is required");
  return blax::io::pair_from_json(blax::io::read_json_file(cfg.pair_path), "pair");
}

int finish(const RunConfig& cfg, Json out, blax::Report report) {
  apply_overrides(report, tolerance_overrides(cfg));
  const bool pass = report.all_pass();
  out["report"] = blax::io::report_to_json(report);
  emit_json(cfg, out);
  for (const blax::Check& c : report.checks()) {
    if (!c.pass) std::cerr << "FAIL " << c.name << " residual " << c.residual << " > " << c.tolerance << "\n";
  }
  return pass ? kExitOk : kExitFailed;
}

int run_series(const RunConfig& cfg) {
  const blax::SeriesSpec spec(cfg.n, cfg.K);
  Json coeffs = Json::array();
  for (int j = 0; j <= cfg.N; ++j) coeffs.push_back(blax::r_coeff(spec, j).str());
  Json poly = Json::array();
  for (const blax::BigInt& c : blax::shift_polynomial(cfg.n, cfg.K)) poly.push_back(c.str());
  Json out{{"n", cfg.n}, {"k", cfg.K}, {"coefficients", coeffs}, {"shift_polynomial", poly}};
  return finish(cfg, out,
                blax::verify_series_identities(cfg.n, cfg.K, cfg.N, blax::default_sample_points()));
}

int run_gramian(const RunConfig& cfg) {
  const blax::OutputPair pair = load_pair(cfg);
  blax::GramianOptions opts;
  opts.k_max = cfg.K;
  const blax::GramianSet g = blax::gramians(pair, opts);
  Json plain = Json::array();
  for (int m = 1; m <= pair.n; ++m) plain.push_back(blax::io::to_json(g.G(m)));
  Json shifted = Json::array();
  for (int k = 0; k <= cfg.K; ++k) shifted.push_back(blax::io::to_json(g.shifted_at(k)));
  emit_json(cfg, Json{{"pair", blax::io::to_json(pair)}, {"plain", plain}, {"shifted", shifted}});
  return kExitOk;
}

int run_inner_family(const RunConfig& cfg, const blax::OutputPair& pair) {
  const std::vector<blax::GridPoint> grid = grid_from(cfg);
  const blax::InnerFamily fam = blax::build_inner_family(pair, cfg.K, cfg.N);
  if (!cfg.kernel_csv.empty()) {
    const std::map<std::string, blax::KernelKind> kinds = {
        {"observability", blax::KernelKind::kObservability},
        {"subspace", blax::KernelKind::kSubspace},
        {"shifted-range", blax::KernelKind::kShiftedRange},
        {"shifted-subspace", blax::KernelKind::kShiftedSubspace},
        {"difference", blax::KernelKind::kDifference},
        {"wandering", blax::KernelKind::kWandering}};
    const auto it = kinds.find(cfg.kernel_kind);
    if (it == kinds.end()) throw blax::ParseError("--kernel", "unknown kind '" + cfg.kernel_kind + "'");
    const blax::CMatrix H = fam.grams.G(pair.n);
    std::ostringstream os;
    blax::io::write_kernel_grid_csv(
        os, blax::kernel_eval(it->second, pair, fam.grams, &H, cfg.kernel_k, grid));
    blax::io::write_text_file(cfg.kernel_csv, os.str());
  }
  return finish(cfg, blax::io::to_json(fam), blax::verify_inner_family(fam, grid, cfg.N));
}

int run_blrep(const RunConfig& cfg) {
  const blax::OutputPair pair = load_pair(cfg);
  switch (cfg.approach) {
    case 1: {
      const blax::Approach1Result r = blax::approach1_build(pair, grid_from(cfg), cfg.N);
      return finish(cfg, blax::io::to_json(r.family), r.report);
    }
    case 2: {
      // The predicate is exercised on the one-zero instance that pair encodes.
      if (pair.d() != 1 || pair.p() != 1) {
        throw blax::ParseError("pair", "approach 2 needs a scalar one-zero pair");
      }
      const blax::Complex alpha = std::conj(pair.A(0, 0));
      const double c = std::pow(1.0 - std::norm(alpha), pair.n / 2.0);
      if (std::abs(std::abs(pair.C(0, 0)) - c) > 1e-12) {
        throw blax::ParseError("pair.C", "approach 2 needs C = (1 - |A|^2)^(n/2)");
      }
      Json out{{"alpha", {alpha.real(), alpha.imag()}}, {"n", pair.n}};
      return finish(cfg, out, blax::approach2_onezero_instance(alpha, pair.n, cfg.N));
    }
    case 3:
      return run_inner_family(cfg, pair);
    case 4: {
      const blax::Approach4Result r = blax::approach4_build(pair, grid_from(cfg), cfg.N);
      Json coeffs = Json::array();
      for (const blax::CMatrix& c : r.theta.coeffs) coeffs.push_back(blax::io::to_json(c));
      Json out{{"pair", blax::io::to_json(pair)},
               {"stage", blax::io::to_json(r.stage)},
               {"theta_taylor", coeffs}};
      return finish(cfg, out, r.report);
    }
    default:
      throw UsageError("--approach must be 1, 2, 3 or 4");
  }
}

int run_simulate(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) throw UsageError("--spec is required");
  const blax::SystemSpec spec =
      blax::io::system_from_json(blax::io::read_json_file(cfg.spec_path), "spec");
  std::vector<blax::CVector> inputs;
  if (!cfg.input_path.empty()) {
    std::ifstream in(cfg.input_path);
    if (!in) throw blax::ParseError(cfg.input_path, "cannot open file");
    inputs = blax::io::read_inputs_csv(in);
  }
  const blax::SignalTrace trace =
      blax::simulate(spec, blax::CVector::Zero(spec.pair.d()), inputs, cfg.T);
  std::ostringstream os;
  blax::io::write_trace_csv(os, trace);
  emit(cfg, os.str());
  return kExitOk;
}

int run_oracle(const RunConfig& cfg) {
  const blax::OneZeroSpec spec{parse_complex(cfg.alpha_text, "--alpha"), cfg.n};
  try {
    spec.validate();
  } catch (const blax::Error& e) {
    throw blax::ParseError("--alpha", e.what());
  }
  const blax::OneZeroOracle oracle = blax::oracle_all(spec, cfg.K);
  return finish(cfg, blax::io::to_json(oracle), oracle.self_checks(grid_from(cfg)));
}

int run_verify_all(const RunConfig& cfg) {
  blax::SuiteOptions opts;
  opts.seed = cfg.seed;
  opts.jobs = cfg.jobs;
  opts.N = cfg.N;
  if (const char* env = std::getenv("BLAX_SEED")) {
    try {
      std::size_t used = 0;
      opts.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw blax::ParseError("BLAX_SEED", std::string("not an unsigned integer: '") + env + "'");
    }
  }
  blax::Report report = blax::run_verify_all(opts);
  apply_overrides(report, tolerance_overrides(cfg));
  emit_json(cfg, blax::io::report_to_json(report, blax::verify_all_checklist()));
  std::size_t failed = 0;
  for (const blax::Check& c : report.checks()) {
    if (c.pass) continue;
    ++failed;
    std::cerr << "FAIL " << c.name << " residual " << c.residual << " > " << c.tolerance
              << " (" << c.witness << ")\n";
  }
  std::cerr << "verify-all: " << report.checks().size() - failed << "/" << report.checks().size()
            << " checks pass\n";
  return failed == 0 ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shift-invariant subspaces of weighted Bergman spaces: constructions and checks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("-N,--truncation", cfg.N, "Taylor truncation order")->capture_default_str();
    sub->add_option("-K,--stages", cfg.K, "Largest stage index")->capture_default_str();
    sub->add_option("-o,--out", cfg.out_path, "Write the result here instead of stdout");
    sub->add_option("--tol", cfg.tol_overrides, "Override a check tolerance, NAME=VALUE");
  };
  auto grid_opt = [&cfg](CLI::App* sub) {
    sub->add_option("--grid", cfg.grid_text, "Comma-separated radii for the sample grid");
  };

  CLI::App* series = app.add_subcommand("series", "Shifted resolvent coefficients and identities");
  common(series);
  series->add_option("--n", cfg.n, "Weight order n")->capture_default_str();

  CLI::App* gramian = app.add_subcommand("gramian", "Plain and shifted gramians of a pair");
  common(gramian);
  gramian->add_option("--pair", cfg.pair_path, "Output pair JSON")->required();

  CLI::App* blrep = app.add_subcommand("blrep", "Inner representation of the subspace of a pair");
  common(blrep);
  grid_opt(blrep);
  blrep->add_option("--pair", cfg.pair_path, "Output pair JSON")->required();
  blrep->add_option("--approach", cfg.approach, "Construction 1, 2, 3 or 4")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();

  CLI::App* inner = app.add_subcommand("inner-family", "Bergman-inner family with verification");
  common(inner);
  grid_opt(inner);
  inner->add_option("--pair", cfg.pair_path, "Output pair JSON")->required();
  inner->add_option("--kernel-csv", cfg.kernel_csv, "Export a kernel grid to this CSV file");
  inner->add_option("--kernel", cfg.kernel_kind, "Kernel kind for --kernel-csv")->capture_default_str();
  inner->add_option("--kernel-k", cfg.kernel_k, "Shift index for shifted kernels")->capture_default_str();

  CLI::App* sim = app.add_subcommand("simulate", "Run the time-varying system on an input CSV");
  common(sim);
  sim->add_option("--spec", cfg.spec_path, "System spec JSON")->required();
  sim->add_option("--input", cfg.input_path, "Input CSV; missing steps are zero");
  sim->add_option("-T,--steps", cfg.T, "Last time step")->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "Closed forms for one-zero subspaces");
  common(oracle);
  grid_opt(oracle);
  oracle->add_option("--alpha", cfg.alpha_text, "Zero alpha as re,im")->capture_default_str();
  oracle->add_option("--n", cfg.n, "Weight order n")->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify-all", "Run the full invariant suite");
  common(verify);
  verify->add_option("--seed", cfg.seed, "Seed of the random instances")->capture_default_str();
  verify->add_option("--jobs", cfg.jobs, "Concurrent tasks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitMalformed;
  }

  try {
    validate(cfg);
    if (series->parsed()) return run_series(cfg);
    if (gramian->parsed()) return run_gramian(cfg);
    if (blrep->parsed()) return run_blrep(cfg);
    if (inner->parsed()) return run_inner_family(cfg, load_pair(cfg));
    if (sim->parsed()) return run_simulate(cfg);
    if (oracle->parsed()) return run_oracle(cfg);
    return run_verify_all(cfg);
  } catch (const blax::ParseError& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const UsageError& e) {
    std::cerr << "invalid options: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const blax::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}
