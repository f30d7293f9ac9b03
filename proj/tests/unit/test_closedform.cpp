#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "ibpf/closedform.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/rng.hpp"
#include "ibpf/special.hpp"

using namespace ibpf;
using cplx = std::complex<double>;

namespace {

// Karhunen-Loeve: int_0^1 B^2 for a Brownian bridge has eigenvalues 1/(pi k)^2, so
// E exp(-z int X) = prod_k (1 + 2z/(pi k)^2)^{-delta/2}; tail summed via log(1+e) ~ e
cplx kl_transform(double delta, cplx z, int terms = 200000) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  cplx logp = 0.0;
  for (int k = terms; k >= 1; --k) logp += std::log(1.0 + 2.0 * z / (pi2 * k * k));
  const double tail = 1.0 / terms - 0.5 / (double(terms) * terms);  // sum_{k>K} 1/k^2
  logp += 2.0 * z / pi2 * tail;
  return std::exp(-0.5 * delta * logp);
}

}  // namespace

TEST_CASE("bridge transform matches the Karhunen-Loeve product") {
  for (double d : {0.5, 1.0, 2.3})
    for (double lam : {0.25, 1.0, 4.0})
      CHECK(closedform::bridge_laplace(d, lam) == doctest::Approx(kl_transform(d, lam).real()).epsilon(1e-9));
}

TEST_CASE("piecewise profile: refinement invariance and total expectation") {
  ThetaProfile flat({0.0, 0.3, 1.0}, {1.5, 1.5});
  CHECK(closedform::bridge_laplace(1.3, flat) == doctest::Approx(closedform::bridge_laplace(1.3, 1.5)).epsilon(1e-13));

  ThetaProfile th({0.0, 0.2, 0.7, 1.0}, {2.0, 0.0, 0.5});
  boost::math::quadrature::exp_sinh<double> q;
  for (double d : {1.0, 2.5}) {
    for (double r : {0.15, 0.5, 0.8}) {
      auto p = special::PinDensityParams::make(d, r);
      const double mixed =
          q.integrate([&](double b) { return closedform::pinned_laplace(d, th, r, b) * special::pin_density(p, b); });
      CHECK(mixed == doctest::Approx(closedform::bridge_laplace(d, th)).epsilon(1e-10));
    }
  }
}

TEST_CASE("pinned parts for a constant profile") {
  const double lam = 0.9, r = 0.3, d = 1.7;
  auto pp = closedform::pinned_parts(d, ThetaProfile::constant(lam), r);
  const double s = std::sqrt(2 * lam);
  const double A = std::pow(s * r / std::sinh(s * r) * s * (1 - r) / std::sinh(s * (1 - r)), d / 2);
  const double C = s / std::tanh(s * r) - 1 / r + s / std::tanh(s * (1 - r)) - 1 / (1 - r);
  CHECK(pp.A == doctest::Approx(A).epsilon(1e-13));
  CHECK(pp.C == doctest::Approx(C).epsilon(1e-12));
  CHECK(closedform::c_coeff(r, lam) == doctest::Approx(C).epsilon(1e-12));
  CHECK(closedform::levy_exponent(lam, r) == doctest::Approx(C / 2).epsilon(1e-12));
}

TEST_CASE("gamma factors relate to the pin density") {
  const double d = 2.2, r = 0.4;
  auto p = special::PinDensityParams::make(d, r);
  for (double b : {0.1, 0.5, 1.3})
    CHECK(closedform::gamma_factor(d, r, b) * std::pow(b, d - 1) == doctest::Approx(special::pin_density(p, b)).epsilon(1e-13));
  CHECK(closedform::gamma_factor_zero(d, r) == doctest::Approx(closedform::gamma_factor(d, r, 1e-9)).epsilon(1e-12));
}

TEST_CASE("expcos benchmark: sampler against the complex transform") {
  // cos(a) e^{-a} = Re e^{-(1-i)a}
  const double d = 1.5, lam = 0.5;
  const cplx z(lam, -lam);
  const cplx s = std::sqrt(2.0 * z);
  const double closed = std::pow(s / std::sinh(s), d / 2).real();
  CHECK(closed == doctest::Approx(kl_transform(d, z).real()).epsilon(1e-9));

  auto phi = make_expcos(ThetaProfile::constant(lam));
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(129));
  RngStream rng(21);
  const int n = 20000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = evaluate(phi, sample_besq_bridge(d, grid, rng));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - closed) < 4.0 * se + 1e-4);
}

TEST_CASE("derivatives at zero: closed route and Monte Carlo fit") {
  const double d = 1.4, r = 0.35, lam = 0.6;
  auto exp_phi = make_exp_quadratic(ThetaProfile::constant(lam));
  auto dz = closedform::derivatives_at_zero(d, r, exp_phi);
  const double h = 1e-5;
  const double fd = (closedform::pinned_laplace(d, lam, r, std::sqrt(h)) - closedform::pinned_laplace(d, lam, r, 0.0)) / h;
  CHECK(dz.G1 == doctest::Approx(fd).epsilon(1e-4));

  // expcos: G(x) = Re A(z) exp(-C(z) x / 2) with complex z = (1 - i) lambda
  const cplx s = std::sqrt(cplx(2 * lam, -2 * lam));
  auto shape = [](cplx u) { return u / std::tanh(u) - 1.0; };
  const cplx A = std::pow(s * r / std::sinh(s * r) * (s * (1 - r)) / std::sinh(s * (1 - r)), d / 2);
  const cplx C = shape(s * r) / r + shape(s * (1 - r)) / (1 - r);
  closedform::FitOptions opt;
  opt.mc.paths = 20000;
  opt.mc.grid_points = 129;
  auto mc = closedform::derivatives_at_zero(d, r, make_expcos(ThetaProfile::constant(lam)), opt);
  CHECK(std::fabs(mc.G0 - A.real()) < 0.02);
  CHECK(std::fabs(mc.G1 - (-0.5 * C * A).real()) < 4.0 * mc.G1_error + 0.02 * std::fabs((0.5 * C * A).real()));
}
