#include <doctest.h>

#include <cmath>

#include "ibpf/taylor.hpp"

using namespace ibpf::taylor;

TEST_CASE("finite-difference derivatives of exp") {
  Smooth1DFunction f{[](double x) { return std::exp(2.0 * x); }, std::nullopt, 1e-2};
  auto d = derivatives_at_zero(f, 3);
  CHECK(d.values[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(d.values[2] == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(d.values[3] == doctest::Approx(8.0).epsilon(1e-4));
}

TEST_CASE("remainders") {
  Smooth1DFunction f{[](double x) { return std::exp(x); }, std::vector<double>(20, 1.0)};
  const double b = 0.3;
  CHECK(taylor_remainder(f, 2, b).value == doctest::Approx(std::exp(b) - 1 - b - b * b / 2).epsilon(1e-13));

  // G(x) = e^{-x}; [G(b^2) - 1 + b^2] / b^4 -> 1/2 as b -> 0
  std::vector<double> d;
  for (int j = 0; j < 24; ++j) d.push_back(j % 2 ? -1.0 : 1.0);
  Smooth1DFunction G{[](double x) { return std::exp(-x); }, d};
  for (double bb : {1e-6, 1e-3, 0.5}) {
    const double x = bb * bb;
    const double ref = bb > 0.1 ? (std::exp(-x) - 1 + x) / (x * x) : 0.5 - x / 6 + x * x / 24;
    CHECK(scaled_square_remainder(G, 1, bb).value == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(square_taylor_remainder(G, 0, 0.5).value == doctest::Approx(std::exp(-0.25) - 1).epsilon(1e-14));
  CHECK_THROWS(scaled_square_remainder(G, 1, 0.0));
}
