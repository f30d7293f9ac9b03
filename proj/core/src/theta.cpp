#include "ibpf/theta.hpp"

#include <algorithm>
#include <stdexcept>

namespace ibpf {

ThetaProfile::ThetaProfile(std::vector<double> breakpoints, std::vector<double> levels)
    : breaks_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (breaks_.size() < 2 || levels_.size() + 1 != breaks_.size())
    throw std::domain_error("theta: need breakpoints 0=t0<...<tm=1 and m levels");
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0)
    throw std::domain_error("theta: breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1])) throw std::domain_error("theta: breakpoints must increase strictly");
  for (double l : levels_)
    if (!(l >= 0.0)) throw std::domain_error("theta: levels must be >= 0");
}

ThetaProfile ThetaProfile::constant(double lambda) { return ThetaProfile({0.0, 1.0}, {lambda}); }

double ThetaProfile::sup() const noexcept { return *std::max_element(levels_.begin(), levels_.end()); }

double ThetaProfile::at(double t) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  std::size_t i = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return levels_[std::min(i, levels_.size() - 1)];
}

double ThetaProfile::pairing(std::span<const double> t, std::span<const double> v) const {
  if (t.size() != v.size()) throw std::invalid_argument("theta pairing: size mismatch");
  double s = 0.0;
  if (is_constant()) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) s += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
    return levels_[0] * s;
  }
  std::size_t piece = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double a = t[i], b = t[i + 1];
    if (!(b > a)) continue;
    const double slope = (v[i + 1] - v[i]) / (b - a);
    while (piece + 1 < levels_.size() && breaks_[piece + 1] <= a) ++piece;
    double lo = a;
    std::size_t p = piece;
    while (lo < b) {
      double hi = std::min(b, breaks_[p + 1]);
      if (p + 1 == levels_.size()) hi = b;
      const double va = v[i] + slope * (lo - a), vb = v[i] + slope * (hi - a);
      s += levels_[p] * 0.5 * (hi - lo) * (va + vb);
      lo = hi;
      if (p + 1 < levels_.size()) ++p;
    }
  }
  return s;
}

}  // namespace ibpf
