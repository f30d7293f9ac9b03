#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ibpf/approx.hpp"

using namespace ibpf::approx;

TEST_CASE("Bernstein partition of unity and affine reproduction") {
  for (int k : {3, 10, 40})
    for (double y : {0.0, 0.17, 0.5, 0.93, 1.0}) {
      double s = 0;
      for (int m = 0; m <= k; ++m) s += bernstein_basis(k, m, y);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
  auto fit = bernstein_fit([](std::span<const double> y) { return 0.5 + 2 * y[0] - 3 * y[1]; }, 6, 2);
  for (double a : {0.1, 0.6})
    for (double b : {0.0, 0.9}) {
      std::vector<double> y{a, b};
      CHECK(fit.eval(y) == doctest::Approx(0.5 + 2 * a - 3 * b).epsilon(1e-13));
      CHECK(fit.partial(0, y) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("exponential-sum lift: compensated and naive evaluation agree on a benign case") {
  auto h = [](std::span<const double> x) { return std::exp(-x[0]) * std::cos(x[1]); };
  auto lift = exp_sum_lift(h, 1, 6, 2);
  CHECK(!lift.terms().empty());
  CHECK(lift.terms().size() <= 49);
  std::vector<double> x{0.3, 0.8};
  CHECK(lift.eval(x) == doctest::Approx(lift.eval_naive(x)).epsilon(1e-9));
}

TEST_CASE("domination suite: sup-norm and derivative bounds for the sin^2 bump") {
  const double pi = std::numbers::pi;
  auto h = [=](double x) { return x >= 0 && x <= 1 ? std::pow(std::sin(pi * x), 2) : 0.0; };
  auto dh = [=](double x) { return x >= 0 && x <= 1 ? pi * std::sin(2 * pi * x) : 0.0; };
  std::vector<double> grid;
  for (int i = 0; i < 600; ++i) grid.push_back(3.0 * i / 599);
  auto rep = domination_suite(h, dh, 2 * pi * pi, 1, {8, 32}, grid);
  for (const auto& r : rep.rows) {
    CHECK(r.sup_pass);
    CHECK(r.deriv_pass);
    CHECK(r.lip_pass);
    CHECK(r.sup_hk <= r.sup_h * (1 + 1e-12));
  }
  CHECK(rep.rows[1].sup_gap < rep.rows[0].sup_gap);
}
