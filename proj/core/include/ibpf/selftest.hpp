#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ibpf::selftest {

struct Options {
  std::uint64_t seed = 20240611;
  unsigned threads = 1;
  std::optional<double> delta;  // restricts criterion 4 to one delta
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::string> details;
  nlohmann::json data;
};

inline constexpr int kCriteria = 9;

CriterionResult run_criterion(int id, const Options& opt);
std::vector<CriterionResult> run_all(const Options& opt, const std::vector<int>& ids = {});

// "criterion 3 PASS  closed-form identity: ..."
std::string summary_line(const CriterionResult& r);
nlohmann::json to_json(const std::vector<CriterionResult>& results);

// exact Laplace transform of the trapezoid-discretized functional exp(-lambda sum w_k X_{t_k})
// for the bridge on a uniform grid of n points, optionally pinned at the node r with X_r = x
double discrete_laplace(double delta, double lambda, std::size_t n_points, std::optional<double> r = std::nullopt,
                        double x = 0.0);

}  // namespace ibpf::selftest
