#include <doctest.h>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "ibpf/rng.hpp"
#include "ibpf/special.hpp"

using namespace ibpf;

namespace {
// t^a (e^{-Ct} - 1), finite down to subnormal t
double power_gap(double t, double a, double C) {
  if (!(t > 0.0) || !std::isfinite(t)) return 0.0;
  const double ct = C * t;
  if (ct < 1e-8) return -C * std::pow(t, a + 1.0) * (1.0 - 0.5 * ct);
  return std::pow(t, a) * std::expm1(-ct);
}
}  // namespace

TEST_CASE("log_gamma and signed gamma agree with boost") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 3.7, 12.25, 150.0})
    CHECK(special::log_gamma(x) == doctest::Approx(boost::math::lgamma(x)).epsilon(1e-13));
  for (double x : {-0.25, -0.5, -1.5, -2.75, 0.3, 4.5}) {
    const double ref = boost::math::tgamma(x);
    CHECK(special::gamma_value(x) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(special::gamma_signed(x).sign == (ref < 0 ? -1 : 1));
  }
}

TEST_CASE("f_shape is u coth u - 1 across branches") {
  for (double u : {1e-6, 0.1, 0.49, 0.51, 2.0, 19.9, 20.1, 40.0}) {
    const double ref = u / std::tanh(u) - 1.0;
    CHECK(special::f_shape(u) == doctest::Approx(ref).epsilon(u < 1e-3 ? 1e-6 : 1e-13));
  }
  CHECK(special::f_shape(0.0) == 0.0);
  CHECK(special::f_shape(1e-4) == doctest::Approx(1e-8 / 3.0).epsilon(1e-10));
}

TEST_CASE("pin density integrates to one and has mean delta r(1-r) for X") {
  boost::math::quadrature::exp_sinh<double> q;
  for (double d : {0.7, 1.0, 2.5}) {
    for (double r : {0.2, 0.5}) {
      auto p = special::PinDensityParams::make(d, r);
      const double mass = q.integrate([&](double b) { return special::pin_density(p, b); });
      const double m1 = q.integrate([&](double b) { return b * b * special::pin_density(p, b); });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(m1 == doctest::Approx(d * r * (1 - r)).epsilon(1e-10));
    }
  }
  CHECK_THROWS(special::PinDensityParams::make(1.0, 1.0));
}

TEST_CASE("tempered power integrals match quadrature") {
  boost::math::quadrature::exp_sinh<double> q;
  for (double a : {-1.8, -1.5, -1.1})
    for (double C : {0.3, 2.0}) {
      const double ref = q.integrate([&](double t) { return power_gap(t, a, C); });
      CHECK(special::tempered_power_integral(a, C) == doctest::Approx(ref).epsilon(1e-8));
    }
  for (double nu : {-2.5, -2.0, -1.4}) {
    const double C = 1.3;
    const double ref = q.integrate([&](double b) { return power_gap(b * b, 0.5 * nu, C); });
    CHECK(special::tempered_power_integral_squared(nu, C) == doctest::Approx(ref).epsilon(1e-8));
  }
  CHECK_THROWS(special::tempered_power_integral(-0.5, 1.0));
}

TEST_CASE("noncentral chi-square draws match boost moments and cdf") {
  RngStream rng(11);
  const double k = 0.6, lam = 2.4;
  const int n = 200000;
  boost::math::non_central_chi_squared dist(k, lam);
  const double q50 = boost::math::quantile(dist, 0.5);
  double s = 0, s2 = 0, below = 0;
  for (int i = 0; i < n; ++i) {
    const double x = special::sample_noncentral_chisq(k, lam, rng);
    s += x;
    s2 += x * x;
    below += x <= q50;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::fabs(mean - (k + lam)) < 4.0 * std::sqrt(2 * (k + 2 * lam) / n));
  CHECK(var == doctest::Approx(2 * (k + 2 * lam)).epsilon(0.03));
  CHECK(std::fabs(below / n - 0.5) < 4.0 * std::sqrt(0.25 / n));
}
