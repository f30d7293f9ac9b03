#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ibpf/direction.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/io.hpp"
#include "ibpf/report.hpp"
#include "ibpf/verify.hpp"

using namespace ibpf;
using nlohmann::json;

namespace {
verify::IbPFReport sample_report() {
  return verify::verify_identity(make_exp_quadratic(ThetaProfile::constant(1.0)), default_direction(),
                                 verify::Regime::from_delta(2.0), verify::ClosedFormMethod{});
}
}  // namespace

TEST_CASE("csv: header only for an empty list, one row per report") {
  CHECK(report::csv({}) == std::string(report::kCsvHeader) + "\n");
  auto text = report::csv({sample_report(), sample_report()});
  std::istringstream is(text);
  std::string line;
  int n = 0;
  std::getline(is, line);
  CHECK(line == "delta,functional,method,lhs,rhs,gap,budget,pass");
  while (std::getline(is, line)) {
    ++n;
    CHECK(line.rfind("2.0,\"exp", 0) == 0);
    CHECK(line.substr(line.size() - 4) == "true");
  }
  CHECK(n == 2);
}

TEST_CASE("json schema, sorted keys and round-trip idempotence") {
  auto j = report::to_json(sample_report());
  for (const char* k : {"meta", "lhs", "rhs", "gap", "budget", "pass"}) CHECK(j.contains(k));
  CHECK(j["lhs"].contains("dh"));
  CHECK(j["lhs"].contains("h2"));
  for (const char* k : {"form", "remainder", "boundary", "total"}) CHECK(j["rhs"].contains(k));
  CHECK(j["rhs"]["boundary"].is_array());
  CHECK(j["budget"].contains("quad"));
  CHECK(j["budget"].contains("stat"));

  const std::string once = report::dump(j);
  CHECK(report::dump(json::parse(once)) == once);
  CHECK(once.find("\"budget\"") < once.find("\"gap\""));
  CHECK(once.find("\"gap\"") < once.find("\"lhs\""));
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5e-7}) CHECK(std::stod(io::format_double(v)) == v);
  CHECK(io::format_double(2.0) == "2.0");
}

TEST_CASE("atomic write replaces the file and names bad paths") {
  const auto p = (std::filesystem::temp_directory_path() / "ibpf_report_test.json").string();
  report::write(p, "a");
  report::write(p, "bb");
  std::ifstream f(p);
  std::string s;
  f >> s;
  CHECK(s == "bb");
  std::filesystem::remove(p);
  try {
    report::write("/nonexistent-dir/x.json", "a");
    FAIL("expected a throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.json") != std::string::npos);
  }
}
