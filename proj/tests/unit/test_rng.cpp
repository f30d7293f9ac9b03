#include <doctest.h>

#include <cmath>

#include "ibpf/rng.hpp"

using namespace ibpf;

TEST_CASE("poisson draws have the right mean, variance and P(0)") {
  for (double mu : {0.3, 4.0, 12.0, 250.0}) {
    RngStream rng(3, {static_cast<std::uint64_t>(mu * 10)});
    const int n = 100000;
    double s = 0, s2 = 0, zeros = 0;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(rng.poisson(mu));
      s += x;
      s2 += x * x;
      zeros += x == 0;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::fabs(mean - mu) < 4.0 * std::sqrt(mu / n));
    CHECK(var == doctest::Approx(mu).epsilon(0.04));
    const double p0 = std::exp(-mu);
    CHECK(std::fabs(zeros / n - p0) < 4.0 * std::sqrt(p0 * (1 - p0) / n) + 1e-12);
  }
  RngStream rng(1);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("streams are reproducible and splits differ") {
  RngStream a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
  RngStream c = RngStream(42).split(1), d = RngStream(42).split(2);
  CHECK(c.uniform() != d.uniform());
  CHECK(RngStream(42).split(5).uniform() == RngStream(42).split(5).uniform());
}

TEST_CASE("uniform stays in the open interval") {
  RngStream rng(0);
  bool ok = true;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ok = ok && u > 0.0 && u < 1.0;
  }
  CHECK(ok);
}
