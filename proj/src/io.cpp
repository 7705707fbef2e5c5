#include "qha/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace qha::io {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const FockParams& p) { return Json{{"n", p.n}, {"t", p.t}, {"D", p.D}, {"Q", p.Q}}; }

FockParams params_from_json(const Json& j) {
  FockParams p;
  p.n = j.at("n").get<int>();
  p.t = j.at("t").get<double>();
  p.D = j.at("D").get<int>();
  p.Q = j.at("Q").get<int>();
  p.validate();
  return p;
}

void write_operator(std::ostream& os, const FockOperator& a) {
  Json j;
  j["format"] = "qha-fock-operator";
  j["schema_version"] = kSchemaVersion;
  j["params"] = to_json(a.params);
  j["basis"] = basis_indexer(a.params);
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < a.m.rows(); ++r)
    for (Eigen::Index c = 0; c < a.m.cols(); ++c) entries.push_back({a.m(r, c).real(), a.m(r, c).imag()});
  j["entries"] = std::move(entries);
  os << j.dump() << "\n";
}

FockOperator read_operator(std::istream& is) {
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("operator file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "qha-fock-operator") throw Error("not an operator container");
    if (j.at("schema_version") != kSchemaVersion) throw Error("unsupported schema version");
    FockParams p = params_from_json(j.at("params"));
    if (j.at("basis").get<std::vector<MultiIndex>>() != basis_indexer(p))
      throw Error("multi-index list does not match the graded order for these params");
    const auto& e = j.at("entries");
    const auto d = static_cast<Eigen::Index>(p.dim());
    if (e.size() != static_cast<std::size_t>(d * d)) throw Error("entry count does not match dimension");
    CMatrix m(d, d);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c, ++k) m(r, c) = {e[k].at(0).get<double>(), e[k].at(1).get<double>()};
    return {p, std::move(m)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed operator container: ") + e.what());
  }
}

void write_vector_csv(std::ostream& os, const FockVector& v, const std::string& header) {
  os << header << "index,multi_index,re,im\n";
  auto idx = basis_indexer(v.params);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::string mi;
    for (std::size_t k = 0; k < idx[i].size(); ++k) mi += (k ? " " : "") + std::to_string(idx[i][k]);
    auto c = v.coeffs(static_cast<Eigen::Index>(i));
    os << i << "," << mi << "," << fmt(c.real()) << "," << fmt(c.imag()) << "\n";
  }
}

void write_values_csv(std::ostream& os, const std::vector<double>& values, const std::string& column,
                      const std::string& header) {
  os << header << "index," << column << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << i << "," << fmt(values[i]) << "\n";
}

namespace {

Json point_json(const Point& z) {
  Json a = Json::array();
  for (const auto& c : z) a.push_back({c.real(), c.imag()});
  return a;
}

}  // namespace

Json to_json(const HeatKernelFit& fit) {
  Json nodes = Json::array();
  for (const auto& z : fit.nodes) nodes.push_back(point_json(z));
  return Json{{"N", fit.N},
              {"t", fit.t},
              {"node_count", fit.nodes.size()},
              {"l1_residual", fit.l1_residual},
              {"ridge", fit.ridge_used},
              {"method", fit.method},
              {"nodes", nodes},
              {"coefficients", fit.coefficients},
              {"flags", fit.flags}};
}

Json to_json(const ApproximationReport& rep, bool include_timings) {
  Json stages = Json::array();
  for (const auto& st : rep.stages) {
    Json s{{"N", st.N},
           {"op_error", st.op_error},
           {"op_error_full", st.op_error_full},
           {"baseline_error", st.baseline_error},
           {"baseline_error_full", st.baseline_error_full},
           {"bound", st.bound},
           {"dominated", st.op_error <= 1.1 * st.bound},
           {"fit", to_json(st.fit)},
           {"flags", st.flags}};
    if (include_timings) s["build_seconds"] = st.build_seconds;
    stages.push_back(std::move(s));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"target", rep.target},
              {"params", to_json(rep.params)},
              {"target_norm", rep.target_norm},
              {"young_constant", rep.young_constant},
              {"stages", stages}};
}

void write_report_csv(std::ostream& os, const ApproximationReport& rep, const std::string& header) {
  os << header << "N,nodes,l1_residual,op_error,op_error_full,baseline_error,bound\n";
  for (const auto& st : rep.stages)
    os << st.N << "," << st.fit.nodes.size() << "," << fmt(st.fit.l1_residual) << "," << fmt(st.op_error) << ","
       << fmt(st.op_error_full) << "," << fmt(st.baseline_error) << "," << fmt(st.bound) << "\n";
}

Json to_json(const SweepRecord& r) {
  Json q = Json::object();
  for (const auto& [k, v] : r.quantities) q[k] = v;
  return Json{{"parameter", r.parameter}, {"quantities", q}, {"params", to_json(r.params)}, {"symbols", r.symbols}};
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, const std::string& header) {
  os << header << "parameter";
  if (!records.empty())
    for (const auto& [k, v] : records.front().quantities) os << "," << k;
  os << "\n";
  for (const auto& r : records) {
    os << fmt(r.parameter);
    for (const auto& [k, v] : r.quantities) os << "," << fmt(v);
    os << "\n";
  }
}

std::string comment_block(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

}  // namespace qha::io
