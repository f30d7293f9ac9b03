#include <doctest.h>

#include <cmath>

#include "ibpf/closedform.hpp"
#include "ibpf/direction.hpp"
#include "ibpf/errors.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/verify.hpp"

using namespace ibpf;
using namespace ibpf::verify;

TEST_CASE("regimes") {
  CHECK_THROWS_AS(Regime::from_delta(0.0), UsageError);
  CHECK_THROWS_AS(Regime::from_delta(3.0), UsageError);
  CHECK_THROWS_AS(Regime::from_delta(-1.0), UsageError);
  CHECK(Regime::from_delta(0.5).cls == RegimeClass::Sub1);
  CHECK(Regime::from_delta(1.0).cls == RegimeClass::One);
  CHECK(Regime::from_delta(2.0).cls == RegimeClass::OneToThree);
  // (delta - 1)(delta - 3)/4: positive below 1, zero at 1, negative in (1,3)
  CHECK(Regime::from_delta(0.5).kappa > 0.0);
  CHECK(Regime::from_delta(1.0).kappa == 0.0);
  CHECK(Regime::from_delta(2.0).kappa == doctest::Approx(-0.25));
}

TEST_CASE("closed-form identity across regimes, both forms") {
  auto h = default_direction();
  for (double d : {0.3, 0.8, 1.0, 1.5, 2.5})
    for (double lam : {0.5, 2.0}) {
      auto rep = verify_identity(make_exp_quadratic(ThetaProfile::constant(lam)), h, Regime::from_delta(d),
                                 ClosedFormMethod{});
      CAPTURE(d);
      CAPTURE(lam);
      CHECK(rep.gap <= 1e-8);
      CHECK(rep.forms_gap <= 1e-8);
      CHECK(rep.pass);
    }
}

TEST_CASE("identity with a piecewise profile and the sin^4 direction") {
  Direction h;
  const double pi = 3.14159265358979323846;
  h.eval = [=](double r) { return std::pow(std::sin(pi * r), 4); };
  h.second_derivative = [=](double r) {
    const double s = std::sin(pi * r), c = std::cos(pi * r);
    return 4 * pi * pi * s * s * (3 * c * c - s * s);
  };
  h.endpoint_order = 4;
  h.sup_h = 1;
  h.sup_h2 = 4 * pi * pi;
  auto rep = verify_identity(parse_functional("piecewise:0,0.4,1;levels=1.5,0.2"), h, Regime::from_delta(1.7),
                             ClosedFormMethod{});
  CHECK(rep.gap <= 1e-8);
}

TEST_CASE("Monte Carlo identity agrees with the closed form at small path counts") {
  auto phi = make_exp_quadratic(ThetaProfile::constant(1.0));
  auto h = default_direction();
  MonteCarloMethod mc;
  mc.paths = 4000;
  mc.grid_points = 129;
  mc.seed = 3;
  auto closed = verify_identity(phi, h, Regime::from_delta(1.5), ClosedFormMethod{});
  auto rep = verify_identity(phi, h, Regime::from_delta(1.5), mc);
  CHECK(rep.budget_stat > 0.0);
  CHECK(rep.gap <= rep.budget);
  CHECK(std::fabs(rep.rhs.value - closed.rhs.value) <= 4 * rep.rhs.stat_error + rep.budget_quad + 1e-3);
  CHECK_THROWS_AS(
      [&] {
        MonteCarloMethod bad = mc;
        bad.grid_points = 100;
        verify_identity(phi, h, Regime::from_delta(1.5), bad);
      }(),
      UsageError);
}

TEST_CASE("closed-form method rejects functionals without a closed form") {
  CHECK_THROWS_AS(verify_identity(parse_functional("expcos:lambda=1"), default_direction(), Regime::from_delta(2.0),
                                  ClosedFormMethod{}),
                  UsageError);
}

TEST_CASE("Chapman integral and continuity through delta = 1") {
  for (double d : {0.5, 2.0})
    for (double r : {0.2, 0.7}) CHECK(chapman_integral(d, 1.0, r) == doctest::Approx(closedform::bridge_laplace(d, 1.0)).epsilon(1e-10));
  auto probe = continuity_probe(1.0);
  CHECK(probe.pass);
}
