#include "ibpf/paths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibpf/io.hpp"
#include "ibpf/special.hpp"

namespace ibpf {

TimeGrid::TimeGrid(std::vector<double> times, std::optional<std::size_t> pin_index)
    : times_(std::move(times)), pin_(pin_index) {
  if (times_.size() < 2) throw std::domain_error("time grid: need at least two points");
  if (times_.front() != 0.0 || times_.back() != 1.0) throw std::domain_error("time grid: endpoints must be 0 and 1");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw std::domain_error("time grid: times must increase strictly");
  if (pin_ && (*pin_ == 0 || *pin_ + 1 >= times_.size()))
    throw std::domain_error("time grid: pin must be an interior node");
}

TimeGrid TimeGrid::uniform(std::size_t n) {
  if (n < 2) throw std::domain_error("time grid: need at least two points");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  t.back() = 1.0;
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::uniform_with_pin(std::size_t n, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("time grid: pin time must lie in (0,1)");
  auto base = uniform(n).times();
  auto it = std::lower_bound(base.begin(), base.end(), r);
  if (*it != r) it = base.insert(it, r);
  return TimeGrid(std::move(base), static_cast<std::size_t>(it - base.begin()));
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - times_.begin());
}

PathSampler::PathSampler(std::shared_ptr<const TimeGrid> grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("path sampler: null grid");
  const auto& t = grid_->times();
  const std::size_t n = t.size();
  // forward sweep from value at t[0] toward 0 at time `end`
  auto forward = [&](std::size_t from, std::size_t to) {
    std::vector<Step> steps;
    const double end = t[to];
    for (std::size_t i = from; i + 1 < to; ++i) {
      const double d = t[i + 1] - t[i], tau = end - t[i + 1];
      steps.push_back({d * tau / (d + tau), tau / (d * (d + tau)), i + 1});
    }
    return steps;
  };
  full_ = forward(0, n - 1);
  pin_ = grid_->pin_index();
  if (pin_) {
    const std::size_t p = *pin_;
    right_ = forward(p, n - 1);
    // left half by time reversal: distance s = r - t, sweep from s=0 (value x) to s=r
    const double r = t[p];
    for (std::size_t i = p; i > 1; --i) {
      const double s0 = r - t[i], s1 = r - t[i - 1];
      const double d = s1 - s0, tau = r - s1;
      left_.push_back({d * tau / (d + tau), tau / (d * (d + tau)), i - 1});
    }
  }
}

double PathSampler::r() const {
  if (!pin_) throw std::domain_error("path sampler: grid has no pin");
  return grid_->times()[*pin_];
}

void PathSampler::sweep(double delta, double x0, const std::vector<Step>& steps, double* out, RngStream& rng) {
  double v = x0;
  std::size_t k = 0;
  for (; k < steps.size(); ++k) {
    const Step& s = steps[k];
    if (delta == 0.0 && v == 0.0) break;  // absorbed
    v = s.scale * special::sample_noncentral_chisq(delta, v * s.nc, rng);
    out[s.index] = v;
  }
  for (; k < steps.size(); ++k) out[steps[k].index] = 0.0;
}

void PathSampler::bridge(double delta, std::span<double> out, RngStream& rng) const {
  if (!(delta >= 0.0)) throw std::domain_error("bridge sampler: delta must be >= 0");
  if (out.size() != grid_->size()) throw std::invalid_argument("bridge sampler: buffer size mismatch");
  out.front() = 0.0;
  out.back() = 0.0;
  sweep(delta, 0.0, full_, out.data(), rng);
}

void PathSampler::pinned_bridge(double delta, double x, std::span<double> out, RngStream& rng) const {
  if (!pin_) throw std::domain_error("pinned sampler: pin time is not on the grid");
  if (!(delta >= 0.0) || !(x >= 0.0)) throw std::domain_error("pinned sampler: delta and x must be >= 0");
  if (out.size() != grid_->size()) throw std::invalid_argument("pinned sampler: buffer size mismatch");
  out.front() = 0.0;
  out.back() = 0.0;
  out[*pin_] = x;
  sweep(delta, x, left_, out.data(), rng);
  sweep(delta, x, right_, out.data(), rng);
}

SquaredBridgePath sample_besq_bridge(double delta, std::shared_ptr<const TimeGrid> grid, RngStream& rng) {
  PathSampler s(grid);
  SquaredBridgePath p{grid, std::vector<double>(grid->size()), delta, std::nullopt};
  s.bridge(delta, p.values, rng);
  return p;
}

namespace {
std::shared_ptr<const TimeGrid> require_pin(const std::shared_ptr<const TimeGrid>& grid, double r) {
  auto idx = grid->index_of(r);
  if (!idx || *idx == 0 || *idx + 1 == grid->size())
    throw std::domain_error("pinned sampler: r is not an interior grid node");
  if (grid->pin_index() == idx) return grid;
  return std::make_shared<const TimeGrid>(grid->times(), idx);
}
}  // namespace

SquaredBridgePath sample_pinned_bridge(double delta, double r, double x,
                                       std::shared_ptr<const TimeGrid> grid, RngStream& rng) {
  auto g = require_pin(grid, r);
  PathSampler s(g);
  SquaredBridgePath p{g, std::vector<double>(g->size()), delta, Pin{r, x}};
  s.pinned_bridge(delta, x, p.values, rng);
  return p;
}

CoupledDraw sample_coupled_pinned(double delta, double r, const std::vector<double>& b_levels,
                                  std::shared_ptr<const TimeGrid> grid, RngStream& rng) {
  auto g = require_pin(grid, r);
  PathSampler s(g);
  CoupledDraw d;
  d.base = {g, std::vector<double>(g->size()), delta, Pin{r, 0.0}};
  s.pinned_bridge(delta, 0.0, d.base.values, rng);
  for (double b : b_levels) {
    if (!(b >= 0.0)) throw std::domain_error("coupled sampler: b levels must be >= 0");
    SquaredBridgePath inc{g, std::vector<double>(g->size()), 0.0, Pin{r, b * b}};
    s.pinned_bridge(0.0, b * b, inc.values, rng);
    d.increments.push_back(std::move(inc));
  }
  return d;
}

double trapezoid(std::span<const double> t, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) s += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
  return s;
}

PathStatistics path_statistics(const SquaredBridgePath& path, const ThetaProfile& theta) {
  const auto& t = path.grid->times();
  const double l1 = trapezoid(t, path.values);
  return {theta.pairing(t, path.values), l1, std::sqrt(l1)};
}

void write_paths_csv(const std::string& file, const std::vector<SquaredBridgePath>& paths, std::uint64_t seed) {
  std::ostringstream os;
  double delta = paths.empty() ? 0.0 : paths.front().delta;
  double r = 0.0, x = 0.0;
  if (!paths.empty() && paths.front().pin) {
    r = paths.front().pin->r;
    x = paths.front().pin->x;
  }
  std::size_t points = paths.empty() ? 0 : paths.front().values.size();
  os << "# delta=" << io::format_double(delta) << " r=" << io::format_double(r)
     << " x=" << io::format_double(x) << " seed=" << seed << " paths=" << paths.size()
     << " points=" << points << "\n";
  os << "path,t,value\n";
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    const auto& t = p.grid->times();
    for (std::size_t i = 0; i < p.values.size(); ++i)
      os << k << ',' << io::format_double(t[i]) << ',' << io::format_double(p.values[i]) << '\n';
  }
  io::atomic_write(file, os.str());
}

}  // namespace ibpf
