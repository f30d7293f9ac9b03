#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "ibpf/direction.hpp"
#include "ibpf/quadrature.hpp"

using namespace ibpf;
using namespace ibpf::quadrature;

TEST_CASE("adaptive integration of smooth and endpoint-singular integrands") {
  QuadratureSpec s{1e-12, 1e-15};
  CHECK(integrate([](double x) { return std::cos(x); }, 0.0, 2.0, s).value == doctest::Approx(std::sin(2.0)).epsilon(1e-12));
  CHECK(integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, s).value ==
        doctest::Approx(2.0).epsilon(1e-9));
  QuadratureSpec bad{0.0, 1e-15};
  CHECK_THROWS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad));
}

TEST_CASE("gaussian tail integrator") {
  QuadratureSpec s{1e-12, 1e-16};
  const double w = 0.7;
  auto v = integrate_gaussian_tail([&](double b) { return std::exp(-b * b / (w * w)); }, 0.5, w, s);
  CHECK(v.value == doctest::Approx(0.5 * std::sqrt(std::numbers::pi) * w * std::erfc(0.5 / w)).epsilon(1e-11));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
  auto gl = gauss_legendre(8);
  double s = 0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  for (double alpha : {-0.75, 0.0, 0.5}) {
    auto lg = gauss_laguerre(10, alpha);
    double m = 0;
    for (std::size_t i = 0; i < lg.nodes.size(); ++i) m += lg.weights[i] * std::pow(lg.nodes[i], 7);
    CHECK(m == doctest::Approx(boost::math::tgamma(alpha + 8.0)).epsilon(1e-11));
  }
}

TEST_CASE("b-integrals against Gamma values") {
  QuadratureSpec s{1e-11, 1e-15};
  // int b^{-1.5} (e^{-b^2} - 1) db = Gamma(-1/4)/2
  auto rem = integrate_b_remainder(2.5, [](double) { return 1.0; }, [](double b) { return std::expm1(-b * b); }, s);
  CHECK(rem.value == doctest::Approx(0.5 * boost::math::tgamma(-0.25)).epsilon(1e-9));
  // int b^{1.5 - 4 + 2} e^{-b^2} db = Gamma(1/4)/2
  auto sc = integrate_b_scaled(1.5, 2, [](double b) { return std::exp(-b * b); }, [](double) { return 1.0; }, s);
  CHECK(sc.value == doctest::Approx(0.5 * boost::math::tgamma(0.25)).epsilon(1e-9));
  CHECK_THROWS(integrate_b_scaled(0.5, 2, [](double) { return 1.0; }, [](double) { return 1.0; }, s));
}

TEST_CASE("r-integral with u^{-3/2} weight matches tanh-sinh") {
  auto h = default_direction();
  auto g = [](double r) { return std::exp(-r); };
  boost::math::quadrature::tanh_sinh<double> ts;
  // sin^3(pi r) u^{-3/2} is bounded; written as a product of bounded factors
  const double pi = 3.14159265358979323846;
  auto f = [&](double r) {
    if (!(r > 0.0 && r < 1.0)) return 0.0;
    const double s = std::sin(pi * r) / std::sqrt(r * (1 - r));
    return s * s * s * g(r);
  };
  const double ref = ts.integrate(f, 0.0, 1.0);
  auto v = integrate_r_weighted(h, 1.5, g, QuadratureSpec{1e-12, 1e-15}, {0.3});
  CHECK(v.value == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100000.1).epsilon(1e-14));
}
