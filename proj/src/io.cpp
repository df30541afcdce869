#include "blax/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "blax/serieskernels.hpp"

namespace blax::io {
namespace {

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(field + "." + key, "missing");
  return *it;
}

long require_int(const Json& j, const char* key, const std::string& field) {
  const Json& v = require(j, key, field);
  if (!v.is_number_integer()) throw ParseError(field + "." + key, "expected an integer");
  return v.get<long>();
}

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(field, "expected a number or [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_to_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_vector_cells(std::ostream& os, const CVector* v, Eigen::Index width) {
  for (Eigen::Index i = 0; i < width; ++i) {
    if (v != nullptr && i < v->size()) {
      os << ',' << csv_number((*v)(i).real()) << ',' << csv_number((*v)(i).imag());
    } else {
      os << ",,";
    }
  }
}

Eigen::Index max_size(const std::vector<CVector>& vs) {
  Eigen::Index m = 0;
  for (const auto& v : vs) m = std::max(m, v.size());
  return m;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& raw, double& out) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  if (s.empty()) return false;
  std::istringstream is(s);
  is >> out;
  return !is.fail() && is.eof();
}

}  // namespace

Json to_json(const CMatrix& M) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) entries.push_back(complex_to_json(M(r, c)));
  }
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"entries", std::move(entries)}};
}

CMatrix matrix_from_json(const Json& j, const std::string& field) {
  const long rows = require_int(j, "rows", field);
  const long cols = require_int(j, "cols", field);
  if (rows < 0 || cols < 0) throw ParseError(field, "negative dimension");
  const Json& entries = require(j, "entries", field);
  if (!entries.is_array()) throw ParseError(field + ".entries", "expected an array");
  if (static_cast<long>(entries.size()) != rows * cols) {
    throw ParseError(field + ".entries", "has " + std::to_string(entries.size()) +
                                             " entries, expected rows*cols = " +
                                             std::to_string(rows * cols));
  }
  CMatrix M(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(r * cols + c);
      M(r, c) = complex_from_json(entries[idx], field + ".entries[" + std::to_string(idx) + "]");
    }
  }
  return M;
}

Json to_json(const OutputPair& pair) {
  return Json{{"n", pair.n}, {"A", to_json(pair.A)}, {"C", to_json(pair.C)}};
}

OutputPair pair_from_json(const Json& j, const std::string& field) {
  const long n = require_int(j, "n", field);
  CMatrix A = matrix_from_json(require(j, "A", field), field + ".A");
  CMatrix C = matrix_from_json(require(j, "C", field), field + ".C");
  try {
    return OutputPair(std::move(A), std::move(C), static_cast<int>(n));
  } catch (const Error& e) {
    throw ParseError(field, e.what());
  }
}

Json to_json(const StageColligation& stage) {
  return Json{{"k", stage.k}, {"B", to_json(stage.B)}, {"D", to_json(stage.D)}};
}

StageColligation stage_from_json(const Json& j, const std::string& field) {
  StageColligation s;
  s.k = static_cast<int>(require_int(j, "k", field));
  s.B = matrix_from_json(require(j, "B", field), field + ".B");
  s.D = matrix_from_json(require(j, "D", field), field + ".D");
  if (s.B.cols() != s.D.cols()) throw ParseError(field, "B and D differ in column count");
  return s;
}

Json to_json(const InnerFamily& fam) {
  Json stages = Json::array();
  for (const auto& s : fam.stages) stages.push_back(to_json(s));
  Json thetas = Json::array();
  for (std::size_t i = 0; i < fam.thetas.size(); ++i) {
    Json coeffs = Json::array();
    for (const auto& c : fam.thetas[i].coeffs) coeffs.push_back(to_json(c));
    thetas.push_back(std::move(coeffs));
  }
  return Json{{"pair", to_json(fam.pair)}, {"stages", std::move(stages)},
              {"theta_taylor", std::move(thetas)}};
}

Json to_json(const SystemSpec& spec) {
  Json stages = Json::array();
  for (const auto& s : spec.stages) stages.push_back(to_json(s));
  return Json{{"pair", to_json(spec.pair)}, {"stages", std::move(stages)}};
}

SystemSpec system_from_json(const Json& j, const std::string& field) {
  SystemSpec spec;
  spec.pair = pair_from_json(require(j, "pair", field), field + ".pair");
  const Json& stages = require(j, "stages", field);
  if (!stages.is_array()) throw ParseError(field + ".stages", "expected an array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    spec.stages.push_back(stage_from_json(stages[i], field + ".stages[" + std::to_string(i) + "]"));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ParseError(field, e.what());
  }
  return spec;
}

Json to_json(const MultiplierFamily& fam) {
  Json B = Json::array();
  Json D = Json::array();
  for (const auto& b : fam.B) B.push_back(to_json(b));
  for (const auto& d : fam.D) D.push_back(to_json(d));
  Json F = Json::array();
  for (std::size_t l = 0; l < fam.F.size(); ++l) {
    Json coeffs = Json::array();
    for (const auto& c : fam.F[l].coeffs) coeffs.push_back(to_json(c));
    F.push_back(Json{{"l", l + 1}, {"coeffs", std::move(coeffs)}});
  }
  return Json{{"n", fam.n}, {"A", to_json(fam.A)}, {"C", to_json(fam.C)},
              {"psi_B", std::move(B)}, {"psi_D", std::move(D)}, {"F_taylor", std::move(F)}};
}

Json to_json(const OneZeroOracle& oracle) {
  const int n = oracle.spec().n;
  Json B = Json::array();
  for (Complex b : oracle.B()) B.push_back(complex_to_json(b));
  Json samples = Json::array();
  for (Complex z : default_sample_points()) {
    Json theta = Json::array();
    for (int k = 0; k <= oracle.K(); ++k) theta.push_back(complex_to_json(oracle.theta(k, z)));
    Json F = Json::array();
    for (int l = 1; l <= n; ++l) F.push_back(complex_to_json(oracle.F(l, z)));
    samples.push_back(Json{{"z", complex_to_json(z)},
                           {"theta", std::move(theta)},
                           {"theta0_geometric", complex_to_json(oracle.theta0(z))},
                           {"F", std::move(F)},
                           {"kM_diagonal", complex_to_json(oracle.kM(z, z))},
                           {"blaschke", complex_to_json(oracle.blaschke(z))}});
  }
  return Json{{"alpha", complex_to_json(oracle.spec().alpha)},
              {"n", n},
              {"K", oracle.K()},
              {"A", complex_to_json(oracle.A())},
              {"C", oracle.C()},
              {"G", vector_to_json(oracle.plain())},
              {"shifted_gramians", vector_to_json(oracle.shifted())},
              {"shifted_gramians_power_sum", vector_to_json(oracle.shifted_power_sum())},
              {"shifted_discrepancy", oracle.shifted_discrepancy()},
              {"shifted_forms_agree", oracle.shifted_forms_agree()},
              {"B", std::move(B)},
              {"D", vector_to_json(oracle.D())},
              {"samples", std::move(samples)}};
}

Json report_to_json(const Report& report, const std::vector<std::string>& checklist) {
  Report sorted = report;
  sorted.sort_by_name();
  Json checks = Json::array();
  for (const auto& c : sorted.checks()) {
    Json item{{"name", c.name}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    if (std::isfinite(c.residual)) {
      item["residual"] = c.residual;
    } else {
      item["residual"] = nullptr;
    }
    if (!c.witness.empty()) item["witness"] = c.witness;
    checks.push_back(std::move(item));
  }
  Json list = Json::array();
  for (const auto& s : checklist) list.push_back(s);
  return Json{{"schema", 1},
              {"pass", sorted.all_pass()},
              {"checks", std::move(checks)},
              {"checklist", std::move(list)}};
}

void write_kernel_grid_csv(std::ostream& os, const KernelGrid& grid) {
  os << "z_re,z_im,zeta_re,zeta_im,row,col,re,im\n";
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    const GridPoint& pt = grid.points[g];
    const CMatrix& v = grid.values[g];
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) {
        os << csv_number(pt.z.real()) << ',' << csv_number(pt.z.imag()) << ','
           << csv_number(pt.zeta.real()) << ',' << csv_number(pt.zeta.imag()) << ',' << r << ','
           << c << ',' << csv_number(v(r, c).real()) << ',' << csv_number(v(r, c).imag()) << '\n';
      }
    }
  }
}

void write_trace_csv(std::ostream& os, const SignalTrace& trace) {
  const Eigen::Index nu = max_size(trace.inputs);
  const Eigen::Index nx = max_size(trace.states);
  const Eigen::Index ny = max_size(trace.outputs);
  os << 't';
  for (Eigen::Index i = 0; i < nu; ++i) os << ",u" << i << "_re,u" << i << "_im";
  for (Eigen::Index i = 0; i < nx; ++i) os << ",x" << i << "_re,x" << i << "_im";
  for (Eigen::Index i = 0; i < ny; ++i) os << ",y" << i << "_re,y" << i << "_im";
  os << '\n';
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    os << t;
    write_vector_cells(os, t < trace.inputs.size() ? &trace.inputs[t] : nullptr, nu);
    write_vector_cells(os, &trace.states[t], nx);
    write_vector_cells(os, t < trace.outputs.size() ? &trace.outputs[t] : nullptr, ny);
    os << '\n';
  }
}

std::vector<CVector> read_inputs_csv(std::istream& is) {
  std::vector<CVector> inputs;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv(line);
    const std::string where = "line " + std::to_string(line_no);
    double t = 0.0;
    if (!parse_double(cells[0], t)) {
      if (inputs.empty() && line_no == 1) continue;
      throw ParseError(where + ".t", "expected a time index");
    }
    if (t != static_cast<double>(inputs.size())) {
      throw ParseError(where + ".t", "expected time " + std::to_string(inputs.size()));
    }
    std::vector<double> values;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (parse_double(cells[c], v)) {
        values.push_back(v);
      } else if (cells[c].find_first_not_of(" \t") != std::string::npos) {
        throw ParseError(where + ".column" + std::to_string(c), "not a number");
      }
    }
    if (values.size() % 2 != 0) throw ParseError(where, "odd number of re/im cells");
    CVector u(static_cast<Eigen::Index>(values.size() / 2));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      u(i) = Complex(values[static_cast<std::size_t>(2 * i)], values[static_cast<std::size_t>(2 * i + 1)]);
    }
    inputs.push_back(std::move(u));
  }
  return inputs;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace blax::io
