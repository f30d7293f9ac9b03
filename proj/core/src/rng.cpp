#include "ibpf/rng.hpp"

#include <cmath>

namespace ibpf {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, const std::vector<std::uint64_t>& lineage) {
  std::uint64_t state = seed;
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(splitmix64(state));
  for (std::uint64_t id : lineage) {
    state ^= id + 0x632be59bd9b4e019ULL;
    push(splitmix64(state));
  }
  push(lineage.size());
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> lineage)
    : seed_(seed), lineage_(std::move(lineage)), engine_(make_engine(seed_, lineage_)) {}

RngStream RngStream::split(std::uint64_t index) const {
  auto child = lineage_;
  child.push_back(index);
  return RngStream(seed_, std::move(child));
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::gamma(double shape, double scale) {
  using P = std::gamma_distribution<double>::param_type;
  return gamma_(engine_, P(shape, scale));
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) {
    // sequential inversion
    double p = std::exp(-mean), F = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > F && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      F += p;
    }
    return k;
  }
  // transformed rejection with squeeze (Hoermann 1993, PTRS)
  const double slam = std::sqrt(mean), loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double U = uniform() - 0.5, V = uniform();
    const double us = 0.5 - std::fabs(U);
    const double kf = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + kf * loglam - std::lgamma(kf + 1.0))
      return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace ibpf
