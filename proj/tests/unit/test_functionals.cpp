#include <doctest.h>

#include <cmath>

#include "ibpf/errors.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/rng.hpp"

using namespace ibpf;

TEST_CASE("functional specs") {
  CHECK(parse_functional("exp:lambda=1.0").is_exp_quadratic());
  CHECK_FALSE(parse_functional("expcos:lambda=0.5").is_exp_quadratic());
  CHECK(parse_functional("piecewise:0,0.5,1;levels=1,2").is_exp_quadratic());
  for (const char* bad : {"exp", "exp:mu=1", "exp:lambda=-1", "foo:lambda=1", "piecewise:0,1", "exp:lambda=x"})
    CHECK_THROWS_AS(parse_functional(bad), UsageError);
}

TEST_CASE("exp functional on a constant path") {
  auto phi = parse_functional("piecewise:0,0.25,1;levels=2,0.4");
  std::vector<double> t{0.0, 0.25, 0.5, 1.0}, x(4, 1.5);
  // <theta, 1.5> = 1.5 (2 * 0.25 + 0.4 * 0.75)
  CHECK(evaluate_squared(phi, t, x) == doctest::Approx(std::exp(-1.5 * 0.8)).epsilon(1e-14));
  CHECK(parse_functional("one").bound() == 1.0);
}

TEST_CASE("directional derivative against a central difference") {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(65));
  RngStream rng(2);
  auto path = sample_besq_bridge(1.5, grid, rng);
  std::vector<double> h;
  for (double t : grid->times()) h.push_back(std::pow(std::sin(3.14159265358979 * t), 3));
  for (const char* spec : {"exp:lambda=0.8", "expcos:lambda=0.8"}) {
    auto phi = parse_functional(spec);
    auto at = [&](double eps) {
      std::vector<double> sq;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const double rho = std::sqrt(path.values[i]) + eps * h[i];
        sq.push_back(rho * rho);
      }
      return evaluate_squared(phi, grid->times(), sq);
    };
    const double e = 1e-5;
    const double fd = (at(e) - at(-e)) / (2 * e);
    auto dd = directional_derivative_squared(phi, grid->times(), path.values, h);
    CHECK(dd.value == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("regularity check respects declared constants") {
  RngStream rng(4);
  RegularityConfig cfg;
  cfg.pairs = 200;
  cfg.grid_points = 33;
  auto rep = regularity_check(parse_functional("expcos:lambda=1.0"), cfg, rng);
  CHECK(rep.pass);
  CHECK(rep.max_lip_ratio <= 1.0);
}
