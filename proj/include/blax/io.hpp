#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "blax/beurlinglax.hpp"
#include "blax/bergman.hpp"
#include "blax/onezero_oracle.hpp"
#include "blax/report.hpp"
#include "blax/statespace.hpp"
#include "blax/tvsystem.hpp"

// JSON and CSV formats of the command-line tool. Every reader throws
// ParseError naming the offending field, with nested fields joined by '.'.

namespace blax::io {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major order.
Json to_json(const CMatrix& M);
CMatrix matrix_from_json(const Json& j, const std::string& field);

/// {"n": n, "A": matrix, "C": matrix}
Json to_json(const OutputPair& pair);
OutputPair pair_from_json(const Json& j, const std::string& field = "pair");

/// {"k": k, "B": matrix, "D": matrix}; zero-column B and D are allowed.
Json to_json(const StageColligation& stage);
StageColligation stage_from_json(const Json& j, const std::string& field);

/// {"pair": ..., "stages": [...], "theta_taylor": [[matrix, ...], ...]}
/// where theta_taylor[k] lists the Taylor coefficients of stage k.
Json to_json(const InnerFamily& fam);

/// {"pair": ..., "stages": [...]}
Json to_json(const SystemSpec& spec);
SystemSpec system_from_json(const Json& j, const std::string& field = "spec");

Json to_json(const MultiplierFamily& fam);
Json to_json(const OneZeroOracle& oracle);

/// Check list, sorted by name, with schema version 1.
Json report_to_json(const Report& report, const std::vector<std::string>& checklist = {});

/// z_re,z_im,zeta_re,zeta_im,row,col,re,im, one line per matrix entry.
void write_kernel_grid_csv(std::ostream& os, const KernelGrid& grid);

/// One row per time t = 0..T+1 with columns u*, x*, y* split into re/im.
/// Cells without a value are left blank.
void write_trace_csv(std::ostream& os, const SignalTrace& trace);

/// Reads input rows "t,re,im,re,im,...". Rows must appear in time order
/// starting at 0; a header row whose first cell is not a number is skipped.
std::vector<CVector> read_inputs_csv(std::istream& is);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace blax::io
