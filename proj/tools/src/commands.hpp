#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace noncollapse::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kRefuted = 2,
  kConvexityLost = 3,
  kVerdictFailed = 4,
};

struct CertifyOptions {
  std::string speed;
  int n = 2;
  std::optional<std::string> property;  // both concave and inverse-concave when absent
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string out;  // JSON destination; stdout when empty
};

struct OracleOptions {
  std::string prop;  // "2.2" or "2.5"
  std::string speed;
  int n = 2;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

struct FlowOptions {
  std::string config;
  std::string out;  // run directory
  std::optional<std::string> speed;
  std::optional<int> grid;
  std::optional<double> cfl;
  std::optional<double> stop_max_f;
  std::optional<std::uint64_t> seed;
  bool timing = false;  // also write timing.json (wall clock, not reproducible)
};

struct ReportOptions {
  std::vector<std::string> runs;
  std::string out;  // JSON destination; the text table always goes to stdout
};

int cmd_certify(const CertifyOptions& o, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err);
int cmd_flow(const FlowOptions& o, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace noncollapse::cli
