#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace ibpf::cli;

namespace {
struct Run {
  int code;
  std::string out, err;
};
Run run_cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = run(args, o, e);
  return {c, o.str(), e.str()};
}
std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }
}  // namespace

TEST_CASE("verify exit codes") {
  auto ok = run_cli({"verify", "--delta", "2", "--functional", "exp:lambda=1", "--method", "closedform"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"pass\": true") != std::string::npos);

  auto bad = run_cli({"verify", "--delta", "3.5"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("(0,3)") != std::string::npos);
  CHECK(run_cli({"bounds", "--delta", "0"}).code == 2);
  CHECK(run_cli({"verify", "--method", "mc", "--paths", "999"}).code == 2);
  CHECK(run_cli({"verify", "--method", "mc", "--grid", "256"}).code == 2);
  CHECK(run_cli({"verify", "--functional", "nope"}).code == 2);
  CHECK(run_cli({"verify", "--no-such-flag"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"verify", "--help"}).code == 0);
}

TEST_CASE("config file is overridden by flags") {
  const auto cfg = tmp("ibpf_cli_test.cfg");
  {
    std::ofstream f(cfg);
    f << "# comment\ndelta = 0.5\nformat = csv\nrel_tol = 1e-10\n";
  }
  auto a = parse({"verify", "--config", cfg});
  CHECK(a.deltas == std::vector<double>{0.5});
  CHECK(a.format == "csv");
  CHECK(a.rel_tol == 1e-10);
  auto b = parse({"verify", "--config", cfg, "--delta", "1.5"});
  CHECK(b.deltas == std::vector<double>{1.5});
  CHECK(b.format == "csv");
  {
    std::ofstream f(cfg);
    f << "colour = blue\n";
  }
  CHECK(run_cli({"verify", "--config", cfg}).code == 2);
  std::filesystem::remove(cfg);
}

TEST_CASE("seed precedence: flag, then IBPF_SEED, then default") {
  ::setenv("IBPF_SEED", "77", 1);
  CHECK(parse({"verify"}).seed == 77);
  CHECK(parse({"verify", "--seed", "5"}).seed == 5);
  ::setenv("IBPF_SEED", "abc", 1);
  CHECK(run_cli({"verify"}).code == 2);
  ::unsetenv("IBPF_SEED");
  CHECK(parse({"verify"}).seed == 1);
}

TEST_CASE("csv output to a file, multiple deltas") {
  const auto out = tmp("ibpf_cli_test.csv");
  auto r = run_cli({"verify", "--delta", "0.5,1,2", "--format", "csv", "--out", out});
  CHECK(r.code == 0);
  std::ifstream f(out);
  std::string line;
  int n = 0;
  std::getline(f, line);
  CHECK(line == "delta,functional,method,lhs,rhs,gap,budget,pass");
  while (std::getline(f, line)) ++n;
  CHECK(n == 3);
  std::filesystem::remove(out);
}

TEST_CASE("sample and approx subcommands") {
  const auto out = tmp("ibpf_cli_paths.csv");
  CHECK(run_cli({"sample", "--delta", "1", "--paths", "2", "--grid", "9", "--r", "0.5", "--x", "0.3", "--out", out}).code == 0);
  CHECK(std::filesystem::exists(out));
  std::filesystem::remove(out);
  CHECK(run_cli({"sample", "--delta", "1", "--paths", "2", "--grid", "9"}).code == 2);
  CHECK(run_cli({"sample", "--r", "1.5", "--out", out}).code == 2);

  auto a = run_cli({"approx", "--k", "8", "--points", "100"});
  CHECK(a.out.rfind("k,sup_gap,deriv_ratio,lip_ratio\n", 0) == 0);
  CHECK((a.code == 0 || a.code == 1));
  CHECK(run_cli({"approx", "--k", "0"}).code == 2);
}

TEST_CASE("selftest runs a single fast criterion") {
  auto r = run_cli({"selftest", "--only", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("criterion 7 PASS") != std::string::npos);
  CHECK(run_cli({"selftest", "--only", "10"}).code == 2);
}
