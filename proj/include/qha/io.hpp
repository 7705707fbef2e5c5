#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qha/approx.hpp"
#include "qha/experiments.hpp"
#include "qha/fock.hpp"

namespace qha::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// Shortest round-trip decimal form.
std::string fmt(double v);

Json to_json(const FockParams& p);
FockParams params_from_json(const Json& j);

// Operator container: JSON text with params, the ordered multi-index
// list and row-major entries as [re, im] double pairs.
void write_operator(std::ostream& os, const FockOperator& a);
FockOperator read_operator(std::istream& is);

// CSV: index, multi-index, re, im
void write_vector_csv(std::ostream& os, const FockVector& v, const std::string& header = "");
void write_values_csv(std::ostream& os, const std::vector<double>& values, const std::string& column,
                      const std::string& header = "");

Json to_json(const HeatKernelFit& fit);
// Timings are left out unless asked for, so reports stay reproducible.
Json to_json(const ApproximationReport& rep, bool include_timings = false);
// Columns: N, nodes, l1_residual, op_error, op_error_full, baseline_error, bound
void write_report_csv(std::ostream& os, const ApproximationReport& rep, const std::string& header = "");

Json to_json(const SweepRecord& r);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, const std::string& header = "");

// Prefixes every line of a config dump with "# " for CSV headers.
std::string comment_block(const std::string& text);

}  // namespace qha::io
