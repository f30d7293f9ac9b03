#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace ibpf {

// Reproducible stream identified by (seed, lineage). Children from split() are
// seeded from the extended lineage, so the tree of streams is fixed by the root
// seed alone and independent of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::vector<std::uint64_t> lineage = {});

  RngStream split(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::uint64_t>& lineage() const noexcept { return lineage_; }

  double uniform();  // open interval (0,1)
  double normal();
  double gamma(double shape, double scale);
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> lineage_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::gamma_distribution<double> gamma_;
};

}  // namespace ibpf
