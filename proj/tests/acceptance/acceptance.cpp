// Acceptance driver: one PASS/FAIL line per criterion; exit 0 only if all selected pass.
#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "ibpf/report.hpp"
#include "ibpf/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app("acceptance suite", "ibpf_acceptance");
  std::vector<int> only;
  std::optional<double> delta;
  std::string json_out;
  ibpf::selftest::Options opt;
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, ibpf::selftest::kCriteria));
  app.add_option("--delta", delta, "restrict criterion 4 to one delta");
  app.add_option("--seed", opt.seed);
  app.add_option("--threads", opt.threads);
  app.add_option("--json", json_out, "write full results here");
  CLI11_PARSE(app, argc, argv);
  opt.delta = delta;
  if (only.empty())
    for (int i = 1; i <= ibpf::selftest::kCriteria; ++i) only.push_back(i);

  std::vector<ibpf::selftest::CriterionResult> all;
  bool ok = true;
  for (int id : only) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = ibpf::selftest::run_all(opt, {id});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& r : res) {
      for (const auto& d : r.details) std::cout << "    " << d << "\n";
      std::cout << ibpf::selftest::summary_line(r) << "  (" << static_cast<int>(secs) << " s)" << std::endl;
      ok = ok && r.pass;
      all.push_back(r);
    }
  }
  if (!json_out.empty()) ibpf::report::write(json_out, ibpf::report::dump(ibpf::selftest::to_json(all)));
  return ok ? 0 : 1;
}
