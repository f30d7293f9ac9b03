#include "ibpf/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ibpf/approx.hpp"
#include "ibpf/errors.hpp"
#include "ibpf/io.hpp"

namespace ibpf {

Direction default_direction() {
  using std::numbers::pi;
  Direction h;
  h.eval = [](double r) {
    const double s = std::sin(pi * r);
    return s * s * s;
  };
  // (sin^3)'' = 3 pi^2 sin (2 cos^2 - sin^2)
  h.second_derivative = [](double r) {
    const double s = std::sin(pi * r), c = std::cos(pi * r);
    return 3.0 * pi * pi * s * (2.0 * c * c - s * s);
  };
  h.endpoint_order = 3;
  h.sup_h = 1.0;
  // max of |3 pi^2 s (2 - 3 s^2)| over s in [0,1] is 3 pi^2 at s = 1
  h.sup_h2 = 3.0 * pi * pi;
  h.description = "sin^3(pi r)";
  return h;
}

double TestFunctional::bound() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExpQuadratic>) return 1.0;
        else return v.bound;
      },
      variant);
}

namespace {

std::string theta_text(const ThetaProfile& th) {
  if (th.is_constant()) return "lambda=" + io::format_double(th.levels()[0]);
  std::ostringstream os;
  os << "breaks=";
  for (std::size_t i = 0; i < th.breakpoints().size(); ++i)
    os << (i ? "," : "") << io::format_double(th.breakpoints()[i]);
  os << ";levels=";
  for (std::size_t i = 0; i < th.levels().size(); ++i) os << (i ? "," : "") << io::format_double(th.levels()[i]);
  return os.str();
}

}  // namespace

TestFunctional make_exp_quadratic(const ThetaProfile& theta) {
  return {ExpQuadratic{theta}, "exp(-<theta,X^2>) " + theta_text(theta)};
}

TestFunctional make_expcos(const ThetaProfile& theta) {
  SquareComposed sc;
  sc.psi = [theta](const ProfileView& z) {
    const double a = theta.pairing(z.times, z.values);
    return std::cos(a) * std::exp(-a);
  };
  sc.differential = [theta](const ProfileView& z, std::span<const double> H) {
    const double a = theta.pairing(z.times, z.values);
    return -(std::sin(a) + std::cos(a)) * std::exp(-a) * theta.pairing(z.times, H);
  };
  // g(a) = cos a e^{-a}: sup|g'| = 1 at a = 0, sup|g''| = 2 sin(pi/4) e^{-pi/4}
  const double L = theta.sup();
  sc.lip_L = L;
  sc.double_increment_L = 2.0 * std::sin(std::numbers::pi / 4) * std::exp(-std::numbers::pi / 4) * L * L;
  sc.bound = 1.0;
  return {sc, "cos(<theta,X^2>) exp(-<theta,X^2>) " + theta_text(theta)};
}

TestFunctional parse_functional(const std::string& spec) {
  auto fail = [&](const std::string& why) -> TestFunctional {
    throw UsageError("malformed functional spec '" + spec + "': " + why);
  };
  auto parse_list = [&](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) fail("bad number '" + item + "'");
      } catch (const std::logic_error&) {
        fail("bad number '" + item + "'");
      }
    }
    return out;
  };
  if (spec == "one") return make_exp_quadratic(ThetaProfile::constant(0.0));
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return fail("expected kind:parameters");
  const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (kind == "exp" || kind == "expcos") {
    if (rest.rfind("lambda=", 0) != 0) return fail("expected lambda=<value>");
    auto v = parse_list(rest.substr(7));
    if (v.size() != 1 || !(v[0] >= 0.0)) return fail("lambda must be a single value >= 0");
    auto th = ThetaProfile::constant(v[0]);
    return kind == "exp" ? make_exp_quadratic(th) : make_expcos(th);
  }
  if (kind == "piecewise" || kind == "piecewise-expcos") {
    const auto semi = rest.find(";levels=");
    if (semi == std::string::npos) return fail("expected breakpoints;levels=...");
    auto br = parse_list(rest.substr(0, semi));
    auto lv = parse_list(rest.substr(semi + 8));
    try {
      ThetaProfile th(br, lv);
      return kind == "piecewise" ? make_exp_quadratic(th) : make_expcos(th);
    } catch (const std::domain_error& e) {
      return fail(e.what());
    }
  }
  return fail("unknown kind '" + kind + "'");
}

double evaluate_squared(const TestFunctional& phi, std::span<const double> t, std::span<const double> sq) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExpQuadratic>) {
          return std::exp(-v.theta.pairing(t, sq));
        } else if constexpr (std::is_same_v<T, SquareComposed>) {
          return v.psi(ProfileView{t, sq});
        } else if constexpr (std::is_same_v<T, GeneralC1b>) {
          std::vector<double> x(sq.size());
          for (std::size_t i = 0; i < sq.size(); ++i) x[i] = std::sqrt(std::max(sq[i], 0.0));
          return v.eval(ProfileView{t, x});
        } else {
          auto p = approx::cell_projections(v.sum->d(), t, sq);
          return v.sum->eval(p);
        }
      },
      phi.variant);
}

double evaluate(const TestFunctional& phi, const SquaredBridgePath& path) {
  return evaluate_squared(phi, path.grid->times(), path.values);
}

DirectionalValue directional_derivative_squared(const TestFunctional& phi, std::span<const double> t,
                                                std::span<const double> sq, std::span<const double> hn) {
  const std::size_t n = sq.size();
  std::vector<double> x(n), H(n);
  double xmax = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sqrt(std::max(sq[i], 0.0));
    H[i] = 2.0 * hn[i] * x[i];  // d/de (X + e h)^2 at e = 0
    xmax = std::max(xmax, x[i]);
    hmax = std::max(hmax, std::fabs(hn[i]));
  }
  if (hmax == 0.0) return {0.0, 0.0};
  if (const auto* eq = std::get_if<ExpQuadratic>(&phi.variant)) {
    const double a = eq->theta.pairing(t, sq);
    return {-std::exp(-a) * eq->theta.pairing(t, H), 0.0};
  }
  if (const auto* sc = std::get_if<SquareComposed>(&phi.variant); sc && sc->differential)
    return {sc->differential(ProfileView{t, sq}, H), 0.0};
  if (const auto* gc = std::get_if<GeneralC1b>(&phi.variant); gc && gc->directional)
    return {gc->directional(ProfileView{t, x}, hn), 0.0};
  if (const auto* es = std::get_if<ExpSumFunctional>(&phi.variant)) {
    const int d = es->sum->d();
    auto p = approx::cell_projections(d, t, sq);
    auto dp = approx::cell_projections(d, t, H);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += es->sum->partial(i, p) * dp[i];
    return {s, 0.0};
  }
  // central differences along h, two step sizes
  const double eps = 1e-4 * std::max(1.0, xmax) / hmax;
  std::vector<double> buf(n);
  auto at = [&](double e) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[i] + e * hn[i];
      buf[i] = v * v;
    }
    return evaluate_squared(phi, t, buf);
  };
  const double d1 = (at(eps) - at(-eps)) / (2.0 * eps);
  const double d2 = (at(0.5 * eps) - at(-0.5 * eps)) / eps;
  const double val = (4.0 * d2 - d1) / 3.0;
  const double err = std::fabs(d2 - d1);
  if (!std::isfinite(val) || err > 1e-3 * std::max(1.0, std::fabs(val)))
    throw NumericError("directional derivative: finite differences did not settle", val, err);
  return {val, err};
}

DirectionalValue directional_derivative(const TestFunctional& phi, const SquaredBridgePath& path, const Direction& h) {
  const auto& t = path.grid->times();
  std::vector<double> hn(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) hn[i] = (t[i] > 0.0 && t[i] < 1.0) ? h.eval(t[i]) : 0.0;
  return directional_derivative_squared(phi, t, path.values, hn);
}

RegularityReport regularity_check(const TestFunctional& phi, const RegularityConfig& cfg, RngStream& rng) {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(cfg.grid_points));
  PathSampler sampler(grid);
  const auto& t = grid->times();
  const std::size_t n = grid->size();
  RegularityReport rep;

  auto draw = [&](std::size_t i, std::vector<double>& out) {
    const double delta = cfg.deltas[i % cfg.deltas.size()];
    sampler.bridge(delta, out, rng);
    const double c = 3.0 * rng.uniform();  // spread the scale
    for (double& v : out) v *= c;
  };
  auto l1 = [&](const std::vector<double>& a, const std::vector<double>* b) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::fabs(a[i] - (b ? (*b)[i] : 0.0));
    return trapezoid(t, d);
  };
  auto l2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::sqrt(a[i]) - std::sqrt(b[i]);
      d[i] = u * u;
    }
    return std::sqrt(trapezoid(t, d));
  };
  auto F = [&](const std::vector<double>& z) { return evaluate_squared(phi, t, z); };

  const bool general = std::holds_alternative<GeneralC1b>(phi.variant);
  double L = 0.0;
  std::optional<double> L2;
  if (const auto* eq = std::get_if<ExpQuadratic>(&phi.variant)) {
    L = eq->theta.sup();
    L2 = L * L;
  } else if (const auto* sc = std::get_if<SquareComposed>(&phi.variant)) {
    L = sc->lip_L;
    L2 = sc->double_increment_L;
  } else if (const auto* gc = std::get_if<GeneralC1b>(&phi.variant)) {
    L = gc->c1_norm;
  } else {
    throw UsageError("regularity_check: exponential-sum functionals carry no declared constants");
  }
  rep.declared_lip = L;
  rep.declared_double = L2;

  std::vector<double> a(n), b(n), c(n), ab(n), ac(n), abc(n);
  for (std::size_t s = 0; s < cfg.pairs; ++s) {
    draw(s, a);
    draw(s + 1, b);
    const double num = std::fabs(F(a) - F(b));
    const double den = general ? l2(a, b) : l1(a, &b);
    double ratio = 0.0;
    if (num > 0.0) ratio = (L > 0.0 && den > 0.0) ? num / (L * den) : INFINITY;
    if (ratio > rep.max_lip_ratio) {
      rep.max_lip_ratio = ratio;
      rep.lip_witness = s;
    }
    if (L2) {
      draw(s + 2, c);
      for (std::size_t i = 0; i < n; ++i) {
        ab[i] = a[i] + b[i];
        ac[i] = a[i] + c[i];
        abc[i] = a[i] + b[i] + c[i];
      }
      const double mixed = std::fabs(F(abc) - F(ab) - F(ac) + F(a));
      const double dd = l1(b, nullptr) * l1(c, nullptr);
      double r2 = 0.0;
      if (mixed > 1e-15) r2 = (*L2 > 0.0 && dd > 0.0) ? mixed / (*L2 * dd) : INFINITY;
      if (r2 > rep.max_double_ratio) {
        rep.max_double_ratio = r2;
        rep.double_witness = s;
      }
    }
    ++rep.samples;
  }
  rep.pass = rep.max_lip_ratio <= 1.0 + 1e-6 && rep.max_double_ratio <= 1.0 + 1e-6;
  return rep;
}

}  // namespace ibpf
