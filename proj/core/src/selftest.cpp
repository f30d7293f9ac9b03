#include "ibpf/selftest.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ibpf/approx.hpp"
#include "ibpf/closedform.hpp"
#include "ibpf/errors.hpp"
#include "ibpf/io.hpp"
#include "ibpf/parallel.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/report.hpp"
#include "ibpf/special.hpp"
#include "ibpf/verify.hpp"

namespace ibpf::selftest {

using nlohmann::json;

namespace {

std::string fmt(double v) { return io::format_double(v); }

struct Line {
  std::ostringstream os;
  template <class T>
  Line& operator<<(const T& v) {
    if constexpr (std::is_floating_point_v<T>)
      os << fmt(v);
    else
      os << v;
    return *this;
  }
  std::string str() const { return os.str(); }
};

// ---------------------------------------------------------------- 1

CriterionResult chapman() {
  CriterionResult res{1, "Chapman/tower consistency", true, {}, json::object()};
  double worst = 0.0;
  for (double d : {0.5, 1.0, 1.5, 2.0, 2.5})
    for (double l : {0.25, 1.0, 4.0})
      for (double r : {0.2, 0.5, 0.7}) {
        const double ref = closedform::bridge_laplace(d, l);
        const double g = std::fabs(verify::chapman_integral(d, l, r) - ref) / ref;
        worst = std::max(worst, g);
        if (g > 1e-10) {
          res.pass = false;
          res.details.push_back((Line() << "delta=" << d << " lambda=" << l << " r=" << r << " rel gap=" << g).str());
        }
      }
  res.details.insert(res.details.begin(), (Line() << "worst relative gap " << worst << " (tolerance 1e-10)").str());
  res.data = {{"worst_relative_gap", worst}};
  return res;
}

// ---------------------------------------------------------------- 2

struct McLaplace {
  double mean, se;
};

McLaplace mc_laplace(std::size_t paths, std::size_t n_points, double lambda, unsigned threads, const RngStream& root,
                     const std::function<void(std::vector<double>&, std::vector<double>&, RngStream&)>& draw,
                     const std::vector<double>& times) {
  const std::size_t chunk = 4096, n_chunks = (paths + chunk - 1) / chunk;
  auto parts = run_chunks<RunningStats>(n_chunks, threads, [&](std::size_t c) {
    RngStream rng = root.split(c);
    RunningStats st;
    std::vector<double> buf(n_points), tmp(n_points);
    const std::size_t end = std::min(paths, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      draw(buf, tmp, rng);
      st.add(std::exp(-lambda * trapezoid(times, buf)));
    }
    return st;
  });
  RunningStats all;
  for (const auto& p : parts) all.merge(p);
  return {all.mean, all.standard_error()};
}

CriterionResult sampler_exactness(const Options& opt) {
  CriterionResult res{2, "Sampler exactness", true, {}, json::object()};
  const double lambda = 1.0, r = 0.5, x = 1.0;
  const std::size_t paths = 100000, n = 1025;
  json rows = json::array();
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(n));
  auto pgrid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(n, r));
  PathSampler free_s(grid), pin_s(pgrid);
  const RngStream root(opt.seed, {0x63322});
  std::uint64_t tag = 0;
  for (double d : {0.5, 1.5, 2.7}) {
    for (bool pinned : {false, true}) {
      const double exact = pinned ? closedform::pinned_laplace(d, lambda, r, std::sqrt(x))
                                  : closedform::bridge_laplace(d, lambda);
      const double disc = pinned ? discrete_laplace(d, lambda, n, r, x) : discrete_laplace(d, lambda, n);
      auto m = mc_laplace(
          paths, n, lambda, opt.threads, root.split(tag++),
          [&](std::vector<double>& b, std::vector<double>&, RngStream& rng) {
            if (pinned)
              pin_s.pinned_bridge(d, x, b, rng);
            else
              free_s.bridge(d, b, rng);
          },
          grid->times());
      const double z = std::fabs(m.mean - exact) / m.se;
      const double bias = std::fabs(disc - exact);
      const bool ok = z <= 4.0 && bias < m.se;
      res.pass = res.pass && ok;
      res.details.push_back((Line() << (pinned ? "pinned   " : "unpinned ") << "delta=" << d << " mc=" << m.mean
                                    << " exact=" << exact << " |gap|/se=" << z << " grid bias=" << bias
                                    << " se=" << m.se << (ok ? "" : "  FAIL"))
                                .str());
      rows.push_back({{"delta", d}, {"pinned", pinned}, {"mc", m.mean}, {"se", m.se}, {"exact", exact},
                      {"grid_bias", bias}, {"z", z}, {"pass", ok}});
    }
  }
  // additivity in law, on a coarser grid against the exact discrete transform
  const std::size_t na = 257;
  auto ga = std::make_shared<const TimeGrid>(TimeGrid::uniform(na));
  auto gpa = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(na, r));
  PathSampler sa(ga), spa(gpa);
  json add = json::array();
  auto additivity = [&](const std::string& name, double target,
                        const std::function<void(std::vector<double>&, std::vector<double>&, RngStream&)>& sum_draw,
                        const std::function<void(std::vector<double>&, std::vector<double>&, RngStream&)>& direct) {
    auto s = mc_laplace(paths, na, lambda, opt.threads, root.split(tag++), sum_draw, ga->times());
    auto dd = mc_laplace(paths, na, lambda, opt.threads, root.split(tag++), direct, ga->times());
    const double z_exact = std::fabs(s.mean - target) / s.se;
    const double z_two = std::fabs(s.mean - dd.mean) / std::hypot(s.se, dd.se);
    const bool ok = z_exact <= 4.0 && z_two <= 4.0;
    res.pass = res.pass && ok;
    res.details.push_back((Line() << name << " sum=" << s.mean << " exact=" << target << " |gap|/se=" << z_exact
                                  << " direct=" << dd.mean << " two-sample z=" << z_two << (ok ? "" : "  FAIL"))
                              .str());
    add.push_back({{"name", name}, {"sum", s.mean}, {"direct", dd.mean}, {"exact", target}, {"z_exact", z_exact},
                   {"z_two_sample", z_two}, {"pass", ok}});
  };
  {
    const double d1 = 0.5, d2 = 1.0;
    additivity(
        "bridges 0.5+1.0=1.5:", discrete_laplace(d1 + d2, lambda, na),
        [&](std::vector<double>& b, std::vector<double>& t, RngStream& rng) {
          sa.bridge(d1, b, rng);
          sa.bridge(d2, t, rng);
          for (std::size_t i = 0; i < na; ++i) b[i] += t[i];
        },
        [&](std::vector<double>& b, std::vector<double>&, RngStream& rng) { sa.bridge(d1 + d2, b, rng); });
  }
  {
    const double d = 1.5;
    additivity(
        "pinned Q^1.5[.|0]+Q^0[.|1]=Q^1.5[.|1]:", discrete_laplace(d, lambda, na, r, x),
        [&](std::vector<double>& b, std::vector<double>& t, RngStream& rng) {
          spa.pinned_bridge(d, 0.0, b, rng);
          spa.pinned_bridge(0.0, x, t, rng);
          for (std::size_t i = 0; i < na; ++i) b[i] += t[i];
        },
        [&](std::vector<double>& b, std::vector<double>&, RngStream& rng) { spa.pinned_bridge(d, x, b, rng); });
  }
  res.data = {{"laplace", rows}, {"additivity", add}};
  return res;
}

// ---------------------------------------------------------------- 3

CriterionResult closed_identity() {
  CriterionResult res{3, "IbPF identity, closed-form mode", true, {}, json::object()};
  const Direction h = default_direction();
  double worst_gap = 0.0, worst_forms = 0.0;
  json rows = json::array();
  for (double d : {0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5})
    for (double l : {0.5, 1.0, 2.0}) {
      const auto rep = verify::verify_identity(make_exp_quadratic(ThetaProfile::constant(l)), h,
                                               verify::Regime::from_delta(d), verify::ClosedFormMethod{});
      worst_gap = std::max(worst_gap, rep.gap);
      worst_forms = std::max(worst_forms, rep.forms_gap);
      res.pass = res.pass && rep.pass;
      Line ln;
      ln << "delta=" << d << " lambda=" << l << " reading=" << rep.rhs.remainder_reading
         << " lhs=" << rep.lhs.total.value << " rhs=" << rep.rhs.value << " gap=" << rep.gap
         << " forms gap=" << rep.forms_gap;
      if (rep.literal_reading) ln << " literal T^-2 diverges=" << (rep.literal_reading->diverges ? "yes" : "no");
      if (!rep.pass) ln << "  FAIL";
      res.details.push_back(ln.str());
      rows.push_back(report::to_json(rep));
    }
  const auto cp = verify::continuity_probe(1.0);
  res.pass = res.pass && cp.pass;
  res.details.push_back((Line() << "continuity delta->1+: extrapolated=" << cp.extrapolated << " at 1=" << cp.at_one
                                << " gap=" << cp.gap << (cp.pass ? "" : "  FAIL"))
                            .str());
  res.details.insert(res.details.begin(), (Line() << "worst gap " << worst_gap << " (1e-6), worst forms gap "
                                                  << worst_forms << " (1e-8)")
                                              .str());
  res.data = {{"reports", rows}, {"continuity", report::to_json(cp)}};
  return res;
}

// ---------------------------------------------------------------- 4

CriterionResult mc_identity(const Options& opt) {
  CriterionResult res{4, "IbPF identity, Monte Carlo mode", true, {}, json::object()};
  const Direction h = default_direction();
  const auto phi = make_expcos(ThetaProfile::constant(1.0));
  std::vector<double> deltas{0.5, 1.0, 1.5, 2.0};
  if (opt.delta) deltas = {*opt.delta};
  json rows = json::array();
  for (double d : deltas) {
    verify::MonteCarloMethod mc;
    mc.paths = 1000000;
    mc.grid_points = 257;
    mc.seed = opt.seed;
    mc.threads = opt.threads;
    const auto rep = verify::verify_identity(phi, h, verify::Regime::from_delta(d), mc);
    res.pass = res.pass && rep.pass;
    res.details.push_back((Line() << "delta=" << d << " lhs=" << rep.lhs.total.value << " rhs=" << rep.rhs.value
                                  << " gap=" << rep.gap << " budget=" << rep.budget << " (4*" << rep.budget_stat
                                  << " + " << rep.budget_quad << ")" << (rep.pass ? "" : "  FAIL"))
                              .str());
    rows.push_back(report::to_json(rep));
  }
  res.data = {{"reports", rows}};
  return res;
}

// ---------------------------------------------------------------- 5

CriterionResult taylor_bounds() {
  CriterionResult res{5, "Taylor-estimate certification", true, {}, json::object()};
  std::vector<double> b_grid{0.0};
  for (int m = 12; m >= 0; --m) b_grid.push_back(std::ldexp(1.0, -m));
  for (double b : {1.5, 2.0, 3.0, 4.0}) b_grid.push_back(b);
  const std::vector<double> r_grid{0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95};
  json rows = json::array();
  for (double d : {0.5, 1.0, 1.5, 2.5})
    for (double l : {0.5, 1.0, 2.0}) {
      const auto rep = verify::bounds_suite(make_exp_quadratic(ThetaProfile::constant(l)),
                                            verify::Regime::from_delta(d), r_grid, b_grid,
                                            verify::ClosedFormMethod{});
      std::size_t bad0 = 0, bad2 = 0;
      double worst0 = 0.0, worst2 = 0.0;
      for (const auto& row : rep.rows) {
        bad0 += !row.t0_ok;
        bad2 += !row.t2_ok;
        if (row.b > 0.0) {
          worst0 = std::max(worst0, std::fabs(row.t0) / row.t0_bound);
          worst2 = std::max(worst2, std::fabs(row.t2) / row.t2_bound);
        }
      }
      res.pass = res.pass && rep.pass;
      res.details.push_back((Line() << "delta=" << d << " lambda=" << l << " max |T0|/(L b^2/3)=" << worst0
                                    << " max |T2|/(L^2 b^4)=" << worst2 << " violations=" << bad0 + bad2
                                    << " first-difference slope=" << rep.first_derivative_slope
                                    << " fitted M=" << rep.fitted_M << (rep.pass ? "" : "  FAIL"))
                                .str());
      rows.push_back({{"delta", d}, {"lambda", l}, {"t0_ratio", worst0}, {"t2_ratio", worst2},
                      {"slope", rep.first_derivative_slope}, {"fitted_M", rep.fitted_M},
                      {"fitted_M_l2norm", rep.fitted_M_l2norm}, {"pass", rep.pass}});
    }
  res.data = {{"cases", rows}};
  return res;
}

// ---------------------------------------------------------------- 6

CriterionResult levy(const Options& opt) {
  CriterionResult res{6, "Levy-measure moment", true, {}, json::object()};
  double worst = 0.0;
  for (double r : {0.2, 0.5, 0.8}) {
    const double v = closedform::levy_exponent(1e-8, r) / 1e-8;
    worst = std::max(worst, std::fabs(v - 1.0 / 3.0));
    res.details.push_back((Line() << "r=" << r << " levy_exponent(1e-8)/1e-8=" << v).str());
  }
  const bool det_ok = worst <= 1e-6;
  const auto cons = verify::consistency_suite({}, {}, {}, opt.seed, 100000, opt.threads);
  const auto& mc = cons.checks.back();
  res.pass = det_ok && mc.pass;
  res.details.push_back((Line() << "worst |ratio - 1/3| " << worst << " (1e-6)" << (det_ok ? "" : "  FAIL")).str());
  res.details.push_back((Line() << "E^0[||X||_1 | X_0.4 = 1]: " << mc.detail << " z=" << mc.worst
                                << (mc.pass ? "" : "  FAIL"))
                            .str());
  res.data = {{"worst_ratio_gap", worst}, {"mc_z", mc.worst}};
  return res;
}

// ---------------------------------------------------------------- 7

CriterionResult gamma_identities() {
  CriterionResult res{7, "Gamma identities", true, {}, json::object()};
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double worst = 0.0;
  for (double nu : {-2.9, -2.5, -2.0, -1.5, -1.1})
    for (double C : {0.1, 1.0, 10.0}) {
      auto f = [&](double b) {
        const double z = C * b * b;
        if (z < 1e-8) return -C * std::pow(b, nu + 2.0) * (1.0 - 0.5 * z);
        return std::pow(b, nu) * std::expm1(-z);
      };
      const double q = ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
      const double v = special::tempered_power_integral_squared(nu, C);
      const double rel = std::fabs(v - q) / std::fabs(q);
      worst = std::max(worst, rel);
      if (rel > 1e-8) {
        res.pass = false;
        res.details.push_back((Line() << "nu=" << nu << " C=" << C << " closed=" << v << " quad=" << q
                                      << " rel=" << rel << "  FAIL")
                                  .str());
      }
    }
  res.details.insert(res.details.begin(),
                     (Line() << "tempered squared integral: worst relative gap " << worst << " (1e-8)").str());
  const double two_sqrt_pi = 2.0 * std::sqrt(std::numbers::pi);
  const double v = -special::tempered_power_integral(-1.5, 1.0);
  auto g = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1e-8) return std::pow(x, -0.5) * (1.0 - 0.5 * x);
    return -std::expm1(-x) * std::pow(x, -1.5);
  };
  const double q = ts.integrate(g, 0.0, 1.0) + es.integrate(g, 1.0, std::numeric_limits<double>::infinity());
  const bool ok = std::fabs(v - two_sqrt_pi) <= 1e-8 && std::fabs(q - two_sqrt_pi) <= 1e-8;
  res.pass = res.pass && ok;
  res.details.push_back((Line() << "int x^-3/2 (1-e^-x) dx: closed=" << v << " quad=" << q << " 2 sqrt(pi)="
                                << two_sqrt_pi << (ok ? "" : "  FAIL"))
                            .str());
  res.data = {{"worst_relative_gap", worst}, {"scalar_closed", v}, {"scalar_quad", q}};
  return res;
}

// ---------------------------------------------------------------- 8

CriterionResult appendix() {
  CriterionResult res{8, "Appendix suite", true, {}, json::object()};
  const std::vector<int> ks{8, 16, 32, 64};
  double pu = 0.0, aff = 0.0;
  for (int k : ks) {
    for (int i = 0; i <= 10000; ++i) {
      const double y = i / 10000.0;
      double s = 0.0;
      for (int m = 0; m <= k; ++m) s += approx::bernstein_basis(k, m, y);
      pu = std::max(pu, std::fabs(s - 1.0));
    }
    const auto fit = approx::bernstein_fit([](std::span<const double> y) { return 0.25 - 1.5 * y[0]; }, k, 1);
    for (int i = 0; i <= 10000; ++i) {
      const double y = i / 10000.0;
      aff = std::max(aff, std::fabs(fit.eval(std::span<const double>(&y, 1)) - (0.25 - 1.5 * y)));
    }
  }
  const bool pu_ok = pu <= 1e-12, aff_ok = aff <= 1e-14;
  res.details.push_back((Line() << "partition of unity max error " << pu << (pu_ok ? "" : "  FAIL")).str());
  res.details.push_back((Line() << "affine reproduction max error " << aff << (aff_ok ? "" : "  FAIL")).str());
  // h = sin^2(pi x) on [0,1], zero beyond: C^1 with Lipschitz derivative (L' = 2 pi^2), n = 1
  const double pi = std::numbers::pi;
  auto h = [pi](double x) { return x >= 0.0 && x <= 1.0 ? std::pow(std::sin(pi * x), 2) : 0.0; };
  auto dh = [pi](double x) { return x >= 0.0 && x <= 1.0 ? pi * std::sin(2.0 * pi * x) : 0.0; };
  std::vector<double> grid;
  for (int i = 0; i < 10000; ++i) grid.push_back(3.0 * i / 9999.0);
  const auto dom = approx::domination_suite(h, dh, 2.0 * pi * pi, 1, ks, grid);
  bool dom_ok = true;
  json rows = json::array();
  for (const auto& r : dom.rows) {
    const bool ok = r.sup_pass && r.pointwise_pass && r.deriv_pass && r.lip_pass;
    dom_ok = dom_ok && ok;
    res.details.push_back((Line() << "k=" << r.k << " sup|h_k|=" << r.sup_hk << " sup|h|=" << r.sup_h
                                  << " pointwise violations=" << r.pointwise_violations << " (worst excess "
                                  << r.worst_pointwise_excess << " at x=" << r.worst_pointwise_x << ")"
                                  << " sup|h_k'|/sup|h'|=" << r.deriv_ratio << " (<= e)"
                                  << " lip ratio=" << r.lip_ratio << (ok ? "" : "  FAIL"))
                              .str());
    rows.push_back({{"k", r.k}, {"sup_gap", r.sup_gap}, {"pointwise_violations", r.pointwise_violations},
                    {"worst_pointwise_excess", r.worst_pointwise_excess}, {"deriv_ratio", r.deriv_ratio},
                    {"lip_ratio", r.lip_ratio}, {"pass", ok}});
  }
  res.pass = pu_ok && aff_ok && dom_ok;
  res.data = {{"partition_error", pu}, {"affine_error", aff}, {"rows", rows}};
  return res;
}

// ---------------------------------------------------------------- 9

CriterionResult determinism(const Options& opt) {
  CriterionResult res{9, "Determinism", true, {}, json::object()};
  const auto phi = make_expcos(ThetaProfile::constant(1.0));
  const Direction h = default_direction();
  auto run = [&](unsigned threads) {
    verify::MonteCarloMethod mc;
    mc.paths = 6000;
    mc.grid_points = 65;
    mc.r_nodes = 4;
    mc.b_nodes = 4;
    mc.chunk = 500;
    mc.seed = opt.seed;
    mc.threads = threads;
    std::vector<verify::IbPFReport> reps;
    for (double d : {0.5, 1.0, 1.5}) reps.push_back(verify::verify_identity(phi, h, verify::Regime::from_delta(d), mc));
    std::string out;
    for (const auto& r : reps) out += report::dump(report::to_json(r));
    return out + report::csv(reps);
  };
  const std::string a = run(1), b = run(1), c = run(4);
  const bool same_runs = a == b, same_threads = a == c;
  res.pass = same_runs && same_threads && !a.empty();
  res.details.push_back(std::string("repeat run byte-identical: ") + (same_runs ? "yes" : "no  FAIL"));
  res.details.push_back(std::string("1 vs 4 threads byte-identical: ") + (same_threads ? "yes" : "no  FAIL"));
  res.details.push_back("report bytes: " + std::to_string(a.size()));
  res.data = {{"bytes", a.size()}, {"repeat_identical", same_runs}, {"threads_identical", same_threads}};
  return res;
}

}  // namespace

double discrete_laplace(double delta, double lambda, std::size_t n_points, std::optional<double> r, double x) {
  if (n_points < 3) throw std::invalid_argument("discrete_laplace: need at least 3 points");
  const double dt = 1.0 / static_cast<double>(n_points - 1);
  std::size_t pin = 0;
  if (r) {
    const double pos = *r / dt;
    if (std::fabs(pos - std::round(pos)) > 1e-9) throw std::invalid_argument("discrete_laplace: r must be a node");
    pin = static_cast<std::size_t>(std::llround(pos));
  }
  std::vector<double> t;
  for (std::size_t i = 1; i + 1 < n_points; ++i)
    if (!r || i != pin) t.push_back(static_cast<double>(i) * dt);
  const Eigen::Index m = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd K(m, m);
  Eigen::VectorXd mean(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double a = t[i], b = t[j];
      double k = std::min(a, b) - a * b;
      if (r) {
        const double rr = *r;
        k -= (std::min(a, rr) - a * rr) * (std::min(b, rr) - b * rr) / (rr * (1.0 - rr));
      }
      K(i, j) = k;
    }
    if (r) mean(i) = t[i] <= *r ? t[i] / *r : (1.0 - t[i]) / (1.0 - *r);
  }
  const double s = std::sqrt(lambda * dt);  // interior trapezoid weight lambda*dt
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) + 2.0 * s * s * K;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw NumericError("discrete_laplace: factorization failed");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  double out = -0.5 * delta * logdet;
  if (r) {
    const Eigen::VectorXd sm = s * mean;
    const double quad = sm.dot(llt.solve(sm));
    out += -x * quad - lambda * dt * x;
  }
  return std::exp(out);
}

CriterionResult run_criterion(int id, const Options& opt) {
  switch (id) {
    case 1: return chapman();
    case 2: return sampler_exactness(opt);
    case 3: return closed_identity();
    case 4: return mc_identity(opt);
    case 5: return taylor_bounds();
    case 6: return levy(opt);
    case 7: return gamma_identities();
    case 8: return appendix();
    case 9: return determinism(opt);
    default: throw UsageError("selftest: criteria are numbered 1.." + std::to_string(kCriteria));
  }
}

std::vector<CriterionResult> run_all(const Options& opt, const std::vector<int>& ids) {
  std::vector<int> which = ids;
  if (which.empty())
    for (int i = 1; i <= kCriteria; ++i) which.push_back(i);
  std::vector<CriterionResult> out;
  for (int i : which) {
    try {
      out.push_back(run_criterion(i, opt));
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      out.push_back({i, "criterion " + std::to_string(i), false, {std::string("error: ") + e.what()}, json::object()});
    }
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + " " + (r.pass ? "PASS" : "FAIL") + "  " + r.name;
}

json to_json(const std::vector<CriterionResult>& results) {
  json a = json::array();
  bool all = true;
  for (const auto& r : results) {
    a.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}, {"data", r.data}});
    all = all && r.pass;
  }
  return {{"criteria", a}, {"pass", all}};
}

}  // namespace ibpf::selftest
