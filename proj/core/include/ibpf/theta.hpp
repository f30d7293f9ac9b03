#pragma once
#include <span>
#include <vector>

namespace ibpf {

// Piecewise-constant nonnegative theta on [0,1].
class ThetaProfile {
 public:
  ThetaProfile(std::vector<double> breakpoints, std::vector<double> levels);
  static ThetaProfile constant(double lambda);

  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  bool is_constant() const noexcept { return levels_.size() == 1; }
  double sup() const noexcept;
  double at(double t) const;  // right-continuous

  // exact int theta * (linear interpolant of values); times nondecreasing,
  // repeated times encode jumps
  double pairing(std::span<const double> times, std::span<const double> values) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> levels_;
};

}  // namespace ibpf
