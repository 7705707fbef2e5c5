#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qha/fock.hpp"
#include "qha/symbol.hpp"

namespace qha::cli {

enum ExitCode { kOk = 0, kToleranceFailure = 1, kUsageError = 2 };

class UsageError : public Error {
 public:
  using Error::Error;
};

// Flat key-value configuration. Keys are dotted ("model.D"); the file
// format is one "key = value" per line with '#' comments.
class RunConfig {
 public:
  RunConfig();

  // Throws UsageError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  // Parses "key=value".
  void set_assignment(const std::string& assignment);
  // Checks ranges and the model invariants; throws UsageError.
  void validate() const;

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;

  FockParams model() const;
  std::uint64_t seed() const;

  // Every key, sorted, one "key = value" per line.
  std::string dump() const;
  // Same without execution-only keys (threads, output.dir), which must
  // not change any result. Embedded in every output file.
  std::string dump_embedded() const;
  std::map<std::string, std::string> embedded() const;

 private:
  std::map<std::string, std::string> values_;
};

// Builds an operator from a target spec such as "toeplitz:gaussian",
// "toeplitz:gaussian:4:0.5,0", "toeplitz:planewave:1,0", "weyl:0.5,0",
// "rank-one:0,0", "projection", "identity". Throws UsageError.
FockOperator parse_target(const std::string& spec, const FockParams& params, std::string* description = nullptr);
Point parse_point(const std::string& text, int n);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qha::cli
