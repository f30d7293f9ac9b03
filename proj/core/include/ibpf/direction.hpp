#pragma once
#include <functional>
#include <string>

namespace ibpf {

// Test direction h on (0,1) with its exact second derivative.
struct Direction {
  std::function<double(double)> eval;
  std::function<double(double)> second_derivative;
  int endpoint_order = 1;  // h(r) = O(r^order) at 0 and O((1-r)^order) at 1
  bool compact_support = false;
  double sup_h = 0.0;
  double sup_h2 = 0.0;
  std::string description;
};

// sin^3(pi r)
Direction default_direction();

}  // namespace ibpf
