#include "ibpf/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ibpf/errors.hpp"
#include "ibpf/parallel.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/quadrature.hpp"
#include "ibpf/special.hpp"

namespace ibpf::closedform {

namespace {

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("r must lie in (0,1)");
}

// log(u / sinh u)
double log_u_over_sinh(double u) {
  if (u < 1e-4) return -u * u / 6.0;
  if (u > 30.0) return std::log(2.0 * u) - u - std::log1p(-std::exp(-2.0 * u));
  return std::log(u / std::sinh(u));
}

struct State {
  double psi, dpsi;
};

// psi'' = 2 theta psi from t = 0 with psi(0)=0, psi'(0)=1, up to `stop`;
// `mirror` runs the ODE for theta(1 - t)
State propagate(const ThetaProfile& th, double stop, bool mirror) {
  const auto& br = th.breakpoints();
  const auto& lv = th.levels();
  const std::size_t m = lv.size();
  State st{0.0, 1.0};
  double t = 0.0;
  for (std::size_t j = 0; j < m && t < stop; ++j) {
    // piece j of the (possibly mirrored) profile
    double a, b, level;
    if (!mirror) {
      a = br[j];
      b = br[j + 1];
      level = lv[j];
    } else {
      a = 1.0 - br[m - j];
      b = 1.0 - br[m - j - 1];
      level = lv[m - j - 1];
    }
    if (b <= t) continue;
    const double end = std::min(b, stop);
    const double h = end - std::max(a, t);
    if (h <= 0.0) continue;
    if (level == 0.0) {
      st.psi += st.dpsi * h;
    } else {
      const double s = std::sqrt(2.0 * level);
      const double ch = std::cosh(s * h), sh = std::sinh(s * h);
      State nx{st.psi * ch + st.dpsi * sh / s, st.psi * s * sh + st.dpsi * ch};
      st = nx;
    }
    t = end;
  }
  return st;
}

}  // namespace

SinhBridgeTransform SinhBridgeTransform::make(double delta, double lambda) {
  if (!(delta >= 0.0) || !(lambda >= 0.0)) throw std::domain_error("bridge transform: inputs must be >= 0");
  return {delta, lambda, std::sqrt(2.0 * lambda)};
}

double SinhBridgeTransform::value() const { return std::exp(0.5 * delta * log_u_over_sinh(s)); }

double bridge_laplace(double delta, double lambda) { return SinhBridgeTransform::make(delta, lambda).value(); }

double bridge_laplace(double delta, const ThetaProfile& theta) {
  if (!(delta >= 0.0)) throw std::domain_error("bridge_laplace: delta must be >= 0");
  if (theta.is_constant()) return bridge_laplace(delta, theta.levels()[0]);
  const State s = propagate(theta, 1.0, false);
  return std::pow(s.psi, -0.5 * delta);
}

double c_coeff(double r, double lambda) {
  check_r(r);
  if (!(lambda >= 0.0)) throw std::domain_error("c_coeff: lambda must be >= 0");
  const double s = std::sqrt(2.0 * lambda);
  return special::f_shape(s * r) / r + special::f_shape(s * (1.0 - r)) / (1.0 - r);
}

double PinnedParts::at(double b) const { return A * std::exp(-0.5 * C * b * b); }

PinnedParts pinned_parts(double delta, const ThetaProfile& theta, double r) {
  check_r(r);
  if (!(delta >= 0.0)) throw std::domain_error("pinned_parts: delta must be >= 0");
  if (theta.is_constant()) {
    const double s = std::sqrt(2.0 * theta.levels()[0]);
    const double logA = 0.5 * delta * (log_u_over_sinh(s * r) + log_u_over_sinh(s * (1.0 - r)));
    return {std::exp(logA), c_coeff(r, theta.levels()[0])};
  }
  const State L = propagate(theta, r, false);
  const State R = propagate(theta, 1.0 - r, true);
  const double C = (L.dpsi / L.psi - 1.0 / r) + (R.dpsi / R.psi - 1.0 / (1.0 - r));
  const double A = std::pow(r / L.psi, 0.5 * delta) * std::pow((1.0 - r) / R.psi, 0.5 * delta);
  return {A, C};
}

double pinned_laplace(double delta, double lambda, double r, double b) {
  return pinned_laplace(delta, ThetaProfile::constant(lambda), r, b);
}

double pinned_laplace(double delta, const ThetaProfile& theta, double r, double b) {
  if (!(b >= 0.0)) throw std::domain_error("pinned_laplace: b must be >= 0");
  return pinned_parts(delta, theta, r).at(b);
}

double gamma_factor_zero(double delta, double r) {
  return special::pin_prefactor(special::PinDensityParams::make(delta, r));
}

double gamma_factor(double delta, double r, double b) {
  auto p = special::PinDensityParams::make(delta, r);
  return special::pin_prefactor(p) * std::exp(-b * b / p.scale());
}

namespace {

double mc_conditional(double delta, double r, const TestFunctional& phi, double x, const McOptions& mc) {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(mc.grid_points, r));
  PathSampler sampler(grid);
  const std::size_t chunk = 4096;
  const std::size_t n_chunks = (mc.paths + chunk - 1) / chunk;
  RngStream root(mc.seed, {0x636f6e64});
  auto parts = run_chunks<RunningStats>(n_chunks, mc.threads, [&](std::size_t c) {
    RngStream rng = root.split(c);
    RunningStats st;
    std::vector<double> buf(grid->size());
    const std::size_t end = std::min(mc.paths, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      sampler.pinned_bridge(delta, x, buf, rng);
      st.add(evaluate_squared(phi, grid->times(), buf));
    }
    return st;
  });
  RunningStats all;
  for (const auto& p : parts) all.merge(p);
  return all.mean;
}

}  // namespace

double sigma_value(double delta, double r, const TestFunctional& phi, double b, const McOptions& mc) {
  if (!(b > 0.0)) throw std::domain_error("sigma_value: b must be > 0; use gamma_factor_zero for the b = 0 limit");
  if (!(delta > 0.0)) throw std::domain_error("sigma_value: delta must be > 0");
  const double g = gamma_factor(delta, r, b);
  if (const auto* eq = std::get_if<ExpQuadratic>(&phi.variant)) return g * pinned_laplace(delta, eq->theta, r, b);
  return g * mc_conditional(delta, r, phi, b * b, mc);
}

double levy_exponent(double lambda, double r) { return 0.5 * c_coeff(r, lambda); }

double pinned_mean_l2norm(double r, double b) {
  check_r(r);
  if (!(b >= 0.0)) throw std::domain_error("pinned_mean_l2norm: b must be >= 0");
  if (b == 0.0) return 0.0;
  const double half_b2 = 0.5 * b * b;
  auto expo = [&](double x) {
    return half_b2 * (special::f_shape(r * x) / r + special::f_shape((1.0 - r) * x) / (1.0 - r));
  };
  quadrature::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-15;
  auto inner = [&](double x) {
    if (x == 0.0) return b * b / 6.0;
    return -std::expm1(-expo(x)) / (x * x);
  };
  // x = 1/t on the tail: int_0^1 (1 - exp(-E(1/t))) dt
  auto tail = [&](double t) {
    if (t == 0.0) return 1.0;
    return -std::expm1(-expo(1.0 / t));
  };
  auto a = quadrature::integrate(inner, 0.0, 1.0, spec);
  auto c = quadrature::integrate(tail, 0.0, 1.0, spec);
  return std::sqrt(2.0 / std::numbers::pi) * (a.value + c.value);
}

DerivativesAtZero derivatives_at_zero(double delta, double r, const TestFunctional& phi, const FitOptions& opt) {
  check_r(r);
  DerivativesAtZero out;
  if (const auto* eq = std::get_if<ExpQuadratic>(&phi.variant)) {
    auto p = pinned_parts(delta, eq->theta, r);
    out.G0 = p.A;
    out.G1 = -0.5 * p.C * p.A;
    out.d2_in_b = 2.0 * out.G1;
    return out;
  }
  const auto& xs = opt.x_nodes;
  if (xs.size() < 2) throw std::invalid_argument("derivatives_at_zero: need at least two fit nodes");
  const double scale = 2.0 * r * (1.0 - r);
  // weighted least squares of g_j = (G(x_j) - G0)/x_j on (1, x_j), weight ~ x_j
  double s0 = 0, s1 = 0, s2 = 0;
  for (double x : xs) {
    const double w = x, xx = x * scale;
    s0 += w;
    s1 += w * xx;
    s2 += w * xx * xx;
  }
  const double det = s0 * s2 - s1 * s1;
  std::vector<double> a;
  for (double x : xs) a.push_back(x * (s2 - s1 * x * scale) / det);

  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(opt.mc.grid_points, r));
  PathSampler sampler(grid);
  const std::size_t chunk = 2048;
  const std::size_t n_chunks = (opt.mc.paths + chunk - 1) / chunk;
  RngStream root(opt.mc.seed, {0x64657276});
  struct Acc {
    RunningStats g0, c;
  };
  auto parts = run_chunks<Acc>(n_chunks, opt.mc.threads, [&](std::size_t ci) {
    RngStream rng = root.split(ci);
    Acc acc;
    const std::size_t n = grid->size();
    std::vector<double> base(n), inc(n), sum(n);
    const std::size_t end = std::min(opt.mc.paths, (ci + 1) * chunk);
    for (std::size_t i = ci * chunk; i < end; ++i) {
      sampler.pinned_bridge(delta, 0.0, base, rng);
      const double f0 = evaluate_squared(phi, grid->times(), base);
      double cval = 0.0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x = xs[j] * scale;
        sampler.pinned_bridge(0.0, x, inc, rng);
        for (std::size_t k = 0; k < n; ++k) sum[k] = base[k] + inc[k];
        cval += a[j] * (evaluate_squared(phi, grid->times(), sum) - f0) / x;
      }
      acc.g0.add(f0);
      acc.c.add(cval);
    }
    return acc;
  });
  Acc all;
  for (const auto& p : parts) {
    all.g0.merge(p.g0);
    all.c.merge(p.c);
  }
  if (!std::isfinite(all.c.mean)) throw NumericError("derivatives_at_zero: Monte Carlo fit failed");
  out.G0 = all.g0.mean;
  out.G1 = all.c.mean;
  out.G1_error = all.c.standard_error();
  out.d2_in_b = 2.0 * out.G1;
  return out;
}

}  // namespace ibpf::closedform
