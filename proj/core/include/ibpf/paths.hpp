#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibpf/rng.hpp"
#include "ibpf/theta.hpp"

namespace ibpf {

class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times, std::optional<std::size_t> pin_index = std::nullopt);
  static TimeGrid uniform(std::size_t n_points);
  // uniform grid with r inserted exactly (no-op if r is already a node)
  static TimeGrid uniform_with_pin(std::size_t n_points, double r);

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  std::optional<std::size_t> pin_index() const noexcept { return pin_; }
  std::optional<std::size_t> index_of(double t) const;

 private:
  std::vector<double> times_;
  std::optional<std::size_t> pin_;
};

struct Pin {
  double r;
  double x;
};

struct SquaredBridgePath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;
  double delta = 0.0;
  std::optional<Pin> pin;
};

struct PathStatistics {
  double pairing;
  double l1_norm;
  double l2_norm_sqrt;  // ||sqrt X||_2 = sqrt(||X||_1)
};

// Precomputed sequential kernels on a fixed grid. Works on raw buffers so the
// Monte Carlo engines can reuse storage.
class PathSampler {
 public:
  explicit PathSampler(std::shared_ptr<const TimeGrid> grid);

  const std::shared_ptr<const TimeGrid>& grid() const noexcept { return grid_; }
  bool pinned() const noexcept { return pin_.has_value(); }
  double r() const;

  // bridge 0 -> 0 on [0,1]
  void bridge(double delta, std::span<double> out, RngStream& rng) const;
  // bridge conditioned on X_r = x (grid must carry a pin)
  void pinned_bridge(double delta, double x, std::span<double> out, RngStream& rng) const;

 private:
  struct Step {
    double scale;   // Delta tau / (Delta + tau)
    double nc;      // tau / (Delta (Delta + tau))
    std::size_t index;
  };
  static void sweep(double delta, double x0, const std::vector<Step>& steps, double* out, RngStream& rng);

  std::shared_ptr<const TimeGrid> grid_;
  std::optional<std::size_t> pin_;
  std::vector<Step> full_, left_, right_;
};

SquaredBridgePath sample_besq_bridge(double delta, std::shared_ptr<const TimeGrid> grid, RngStream& rng);
SquaredBridgePath sample_pinned_bridge(double delta, double r, double x,
                                       std::shared_ptr<const TimeGrid> grid, RngStream& rng);

struct CoupledDraw {
  SquaredBridgePath base;                     // Q^delta[. | X_r = 0]
  std::vector<SquaredBridgePath> increments;  // independent Q^0[. | X_r = b_i^2]
};
CoupledDraw sample_coupled_pinned(double delta, double r, const std::vector<double>& b_levels,
                                  std::shared_ptr<const TimeGrid> grid, RngStream& rng);

PathStatistics path_statistics(const SquaredBridgePath& path, const ThetaProfile& theta);
double trapezoid(std::span<const double> times, std::span<const double> values);

// one CSV per batch: header comment with delta, r, x, seed; then t,value rows
// per path separated by a path column
void write_paths_csv(const std::string& file, const std::vector<SquaredBridgePath>& paths,
                     std::uint64_t seed);

}  // namespace ibpf
