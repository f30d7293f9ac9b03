#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ibpf::cli {

struct RunConfig {
  std::string command;
  std::vector<double> deltas{2.0};
  std::string functional = "exp:lambda=1.0";
  std::string direction = "default";
  std::string method = "closedform";
  std::size_t paths = 100000;
  std::size_t grid = 257;
  std::uint64_t seed = 1;
  double rel_tol = 1e-11;
  double abs_tol = 1e-15;
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
  // sample
  double r = -1.0;
  double x = 0.0;
  // approx
  int n = 1;
  std::vector<int> k_list{8, 16, 32, 64};
  std::size_t points = 10000;
  // selftest
  std::vector<int> only;
};

enum Exit : int { kPass = 0, kToleranceFailure = 1, kUsage = 2 };

// parses, validates and runs; reports go to `out` or the --out file
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// exposed for tests: parse + validate only (throws UsageError)
RunConfig parse(const std::vector<std::string>& args);

}  // namespace ibpf::cli
