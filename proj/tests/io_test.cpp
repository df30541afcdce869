#include <gtest/gtest.h>

#include <sstream>

#include "blax/io.hpp"

namespace blax::io {
namespace {

CMatrix sample_matrix() {
  CMatrix M(2, 3);
  M << Complex(1.0, -1.0), 2.0, 0.125, Complex(0.0, 3.5), -4.0, Complex(1e-17, 2e300);
  return M;
}

TEST(MatrixJson, RoundTripsBitExactly) {
  const CMatrix M = sample_matrix();
  const Json j = to_json(M);
  EXPECT_EQ(j["rows"], 2);
  EXPECT_EQ(j["cols"], 3);
  EXPECT_EQ(j["entries"].size(), 6u);
  EXPECT_EQ(j["entries"][1][0], 2.0);
  const CMatrix back = matrix_from_json(Json::parse(j.dump()), "M");
  EXPECT_EQ(back, M);
}

TEST(MatrixJson, EntryCountMismatchNamesField) {
  const Json j = Json::parse(R"({"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,1]]})");
  try {
    matrix_from_json(j, "pair.A");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field().rfind("pair.A", 0), 0u) << e.field();
    EXPECT_NE(std::string(e.what()).find("entries"), std::string::npos) << e.what();
  }
}

TEST(MatrixJson, MalformedEntryRejected) {
  const Json j = Json::parse(R"({"rows": 1, "cols": 1, "entries": [[1]]})");
  EXPECT_THROW(matrix_from_json(j, "M"), ParseError);
  const Json k = Json::parse(R"({"rows": 1, "cols": 1, "entries": [["a", 0]]})");
  EXPECT_THROW(matrix_from_json(k, "M"), ParseError);
  const Json missing = Json::parse(R"({"rows": 1, "entries": [[1, 0]]})");
  EXPECT_THROW(matrix_from_json(missing, "M"), ParseError);
}

TEST(PairJson, RoundTripAndValidation) {
  const OutputPair pair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 0.75), 2);
  const OutputPair back = pair_from_json(to_json(pair));
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ(back.A, pair.A);
  EXPECT_EQ(back.C, pair.C);

  Json bad = to_json(pair);
  bad["C"] = to_json(CMatrix::Zero(1, 2));
  EXPECT_THROW(pair_from_json(bad), ParseError);
  Json no_n = to_json(pair);
  no_n.erase("n");
  EXPECT_THROW(pair_from_json(no_n), ParseError);
}

TEST(SystemJson, RoundTrip) {
  SystemSpec spec;
  spec.pair = OutputPair(CMatrix::Constant(1, 1, 0.5), CMatrix::Constant(1, 1, 1.0), 1);
  for (int k = 0; k < 3; ++k) {
    StageColligation s;
    s.k = k;
    s.B = CMatrix::Constant(1, 2, 0.1 * k);
    s.D = CMatrix::Constant(1, 2, -0.2 * k);
    spec.stages.push_back(s);
  }
  const SystemSpec back = system_from_json(to_json(spec));
  ASSERT_EQ(back.stages.size(), 3u);
  EXPECT_EQ(back.stages[2].B, spec.stages[2].B);
  EXPECT_EQ(back.stages[2].D, spec.stages[2].D);
}

TEST(ReportJson, SortedVersionedAndNullForNan) {
  Report r;
  r.add("zeta", 1e-12, 1e-10);
  r.add("alpha", std::numeric_limits<double>::quiet_NaN(), 1e-10, "nan here");
  const Json j = report_to_json(r, {"item"});
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["pass"], false);
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["name"], "alpha");
  EXPECT_TRUE(j["checks"][0]["residual"].is_null());
  EXPECT_EQ(j["checks"][1]["pass"], true);
  EXPECT_EQ(j["checklist"][0], "item");
}

TEST(InputsCsv, ParsesWithHeader) {
  std::istringstream is("t,u0_re,u0_im\n0,1,0\n1,0.5,-2\n");
  const std::vector<CVector> u = read_inputs_csv(is);
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[1](0), Complex(0.5, -2.0));
}

TEST(InputsCsv, RejectsOutOfOrderTime) {
  std::istringstream is("0,1,0\n2,0,0\n");
  try {
    read_inputs_csv(is);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "line 2.t");
  }
}

TEST(InputsCsv, RejectsOddCellCount) {
  std::istringstream is("0,1,0,2\n");
  EXPECT_THROW(read_inputs_csv(is), ParseError);
}

TEST(TraceCsv, HeaderAndBlankCells) {
  SignalTrace t;
  t.inputs = {CVector::Ones(1)};
  t.states = {CVector::Zero(1), CVector::Ones(1)};
  t.outputs = {CVector::Constant(1, Complex(0.0, 1.0))};
  std::ostringstream os;
  write_trace_csv(os, t);
  std::istringstream lines(os.str());
  std::string header;
  std::string row0;
  std::string row1;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  EXPECT_EQ(header, "t,u0_re,u0_im,x0_re,x0_im,y0_re,y0_im");
  EXPECT_EQ(row1.rfind("1,,,", 0), 0u) << row1;
  EXPECT_EQ(row1.substr(row1.size() - 2), ",,");
}

TEST(JsonFile, MissingFileIsParseError) {
  EXPECT_THROW(read_json_file("/nonexistent/path.json"), ParseError);
}

}  // namespace
}  // namespace blax::io
