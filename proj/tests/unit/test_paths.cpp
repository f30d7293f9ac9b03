#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ibpf/paths.hpp"
#include "ibpf/rng.hpp"

using namespace ibpf;

TEST_CASE("time grids") {
  auto g = TimeGrid::uniform(5);
  CHECK(g.times() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  auto p = TimeGrid::uniform_with_pin(5, 0.3);
  REQUIRE(p.pin_index().has_value());
  CHECK(p.size() == 6);
  CHECK(p.times()[*p.pin_index()] == 0.3);
  auto q = TimeGrid::uniform_with_pin(5, 0.5);
  CHECK(q.size() == 5);
  CHECK(*q.pin_index() == 2);
  CHECK_THROWS(TimeGrid::uniform_with_pin(5, 1.0));
}

TEST_CASE("unpinned marginal is Gamma(delta/2, 2r(1-r))") {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(9));
  for (double d : {0.5, 1.5, 2.7}) {
    RngStream rng(5, {static_cast<std::uint64_t>(d * 10)});
    const std::size_t idx = 3;  // r = 0.375
    const double r = 0.375, scale = 2 * r * (1 - r);
    boost::math::gamma_distribution<double> law(0.5 * d, scale);
    const double q25 = boost::math::quantile(law, 0.25), q75 = boost::math::quantile(law, 0.75);
    const int n = 40000;
    double s = 0, lo = 0, hi = 0;
    bool ends = true;
    for (int i = 0; i < n; ++i) {
      auto path = sample_besq_bridge(d, grid, rng);
      ends = ends && path.values.front() == 0.0 && path.values.back() == 0.0;
      const double x = path.values[idx];
      s += x;
      lo += x <= q25;
      hi += x <= q75;
    }
    CHECK(ends);
    CHECK(std::fabs(s / n - d * r * (1 - r)) < 4.0 * std::sqrt(boost::math::variance(law) / n));
    CHECK(std::fabs(lo / n - 0.25) < 4.0 * std::sqrt(0.1875 / n));
    CHECK(std::fabs(hi / n - 0.75) < 4.0 * std::sqrt(0.1875 / n));
  }
}

TEST_CASE("pinned paths hit the pin; delta = 0 with x = 0 is identically zero") {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(17, 0.3));
  RngStream rng(8);
  auto p = sample_pinned_bridge(1.2, 0.3, 0.7, grid, rng);
  CHECK(p.values[*grid->pin_index()] == 0.7);
  CHECK(p.values.front() == 0.0);
  CHECK(p.values.back() == 0.0);
  auto z = sample_pinned_bridge(0.0, 0.3, 0.0, grid, rng);
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("pinned marginal mean at a neighbouring time") {
  // given X_r = x, X_t for t < r is a BESQ bridge from 0 to x on [0,r]:
  // E X_t = delta t(r-t)/r + x (t/r)^2
  const double d = 1.5, r = 0.5, x = 0.8, t = 0.25;
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(9, r));
  const std::size_t idx = *grid->index_of(t);
  RngStream rng(13);
  const int n = 40000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = sample_pinned_bridge(d, r, x, grid, rng).values[idx];
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - (d * t * (r - t) / r + x * (t / r) * (t / r))) < 4.0 * se);
}

TEST_CASE("trapezoid is exact on affine data") {
  std::vector<double> t{0.0, 0.1, 0.5, 1.0}, v;
  for (double s : t) v.push_back(2.0 * s + 1.0);
  CHECK(trapezoid(t, v) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("path csv layout") {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(3));
  RngStream rng(1);
  std::vector<SquaredBridgePath> ps{sample_besq_bridge(1.0, grid, rng), sample_besq_bridge(1.0, grid, rng)};
  const auto file = (std::filesystem::temp_directory_path() / "ibpf_paths_test.csv").string();
  write_paths_csv(file, ps, 99);
  std::ifstream f(file);
  std::string l;
  std::getline(f, l);
  CHECK(l.rfind("# delta=1.0", 0) == 0);
  CHECK(l.find("seed=99") != std::string::npos);
  std::getline(f, l);
  CHECK(l == "path,t,value");
  int rows = 0;
  while (std::getline(f, l)) ++rows;
  CHECK(rows == 6);
  std::filesystem::remove(file);
}
