#include <sstream>

#include "doctest.h"
#include "qha/approx.hpp"
#include "qha/experiments.hpp"
#include "qha/io.hpp"

using namespace qha;

TEST_SUITE("io") {

TEST_CASE("shortest round trip formatting") {
  for (double v : {0.1, 1.0 / 3, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(io::fmt(v)) == v);
  CHECK(io::fmt(0.1) == "0.1");
}

TEST_CASE("operator container round trip") {
  FockParams p{2, 0.5, 3, 6};
  FockOperator a = random_finite_rank(p, 2, 17);
  std::stringstream ss;
  io::write_operator(ss, a);
  FockOperator b = io::read_operator(ss);
  CHECK(b.params.n == 2);
  CHECK(b.params.t == 0.5);
  CHECK(b.params.D == 3);
  CHECK(b.params.Q == 6);
  CHECK((a.m - b.m).norm() == 0);
}

TEST_CASE("operator container validation") {
  FockParams p{1, 1, 2, 4};
  std::stringstream ss;
  io::write_operator(ss, identity_operator(p));
  auto j = io::Json::parse(ss.str());

  auto reject = [](io::Json bad) {
    std::stringstream s(bad.dump());
    CHECK_THROWS_AS(io::read_operator(s), Error);
  };
  io::Json wrong_format = j;
  wrong_format["format"] = "other";
  reject(wrong_format);
  io::Json wrong_version = j;
  wrong_version["schema_version"] = "2";
  reject(wrong_version);
  io::Json wrong_basis = j;
  wrong_basis["basis"][1] = {2};
  reject(wrong_basis);
  io::Json short_entries = j;
  short_entries["entries"].erase(0);
  reject(short_entries);
  std::stringstream junk("not json");
  CHECK_THROWS_AS(io::read_operator(junk), Error);
}

TEST_CASE("csv writers") {
  FockParams p{1, 1, 2, 4};
  std::ostringstream v;
  io::write_vector_csv(v, basis_vector(p, 1), "# x\n");
  CHECK(v.str().rfind("# x\n", 0) == 0);
  std::ostringstream s;
  io::write_values_csv(s, {3, 2, 1}, "singular_value");
  CHECK(s.str() == "index,singular_value\n0,3\n1,2\n2,1\n");
  CHECK(io::comment_block("a = 1\nb = 2\n") == "# a = 1\n# b = 2\n");
}

TEST_CASE("report serialization") {
  ApproximationReport rep;
  rep.target = "t";
  rep.params = {1, 1, 4, 6};
  rep.target_norm = 1;
  rep.young_constant = 1;
  ApproximationStage st;
  st.N = 2;
  st.fit.N = 2;
  st.fit.nodes = {Point{0.0}};
  st.fit.coefficients = {1};
  st.op_error = 0.5;
  st.bound = 0.6;
  st.build_seconds = 3;
  rep.stages.push_back(st);
  io::Json j = io::to_json(rep);
  CHECK(j["schema_version"] == "1");
  CHECK(j["stages"][0]["dominated"] == true);
  CHECK_FALSE(j["stages"][0].contains("build_seconds"));
  CHECK(io::to_json(rep, true)["stages"][0].contains("build_seconds"));
  std::ostringstream csv;
  io::write_report_csv(csv, rep);
  CHECK(csv.str().rfind("N,nodes,l1_residual,op_error,op_error_full,baseline_error,bound\n", 0) == 0);
}

TEST_CASE("sweep serialization") {
  SweepRecord r;
  r.parameter = 0.5;
  r.quantities = {{"a", 1}, {"b", 2}};
  r.params = {1, 0.5, 4, 6};
  std::ostringstream csv;
  io::write_sweep_csv(csv, {r});
  CHECK(csv.str() == "parameter,a,b\n0.5,1,2\n");
  CHECK(io::to_json(r)["params"]["t"] == 0.5);
}

}  // TEST_SUITE
