#include "ibpf/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ibpf/rng.hpp"

namespace ibpf::special {

PinDensityParams PinDensityParams::make(double delta, double r) {
  if (!(delta >= 0.0)) throw std::domain_error("pin density: delta must be >= 0");
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("pin density: r must lie in (0,1)");
  return {delta, r};
}

double SignedLogGamma::value() const { return sign * std::exp(log_abs); }

namespace {
bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }
}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    if (is_nonpositive_integer(x)) throw std::domain_error("log_gamma: pole at non-positive integer");
    throw std::domain_error("log_gamma: argument must be positive, use gamma_signed");
  }
  return std::lgamma(x);
}

SignedLogGamma gamma_signed(double x) {
  if (std::isnan(x) || is_nonpositive_integer(x))
    throw std::domain_error("gamma_signed: pole at non-positive integer");
  if (x > 0.0) return {1, std::lgamma(x)};
  // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x); reduce mod 2 for an accurate sine
  double red = std::fmod(x, 2.0);  // in (-2, 0]
  double s = std::sin(std::numbers::pi * red);
  int sign = s > 0.0 ? 1 : -1;
  double la = std::log(std::numbers::pi) - std::log(std::fabs(s)) - std::lgamma(1.0 - x);
  return {sign, la};
}

double gamma_value(double x) { return gamma_signed(x).value(); }

namespace {

// 2^{2n} B_{2n} / (2n)!: the coefficients of u coth u = sum c_n u^{2n}
struct CothSeries {
  std::array<double, 14> c{};
  CothSeries() {
    // Bernoulli numbers B_2 .. B_28 as exact ratios
    const double num[] = {1.0, -1.0, 1.0, -1.0, 5.0, -691.0, 7.0, -3617.0, 43867.0,
                          -174611.0, 854513.0, -236364091.0, 8553103.0, -23749461029.0};
    const double den[] = {6.0, 30.0, 42.0, 30.0, 66.0, 2730.0, 6.0, 510.0, 798.0,
                          330.0, 138.0, 2730.0, 6.0, 870.0};
    double pow4 = 1.0, fact = 1.0;
    for (int n = 1; n <= 14; ++n) {
      pow4 *= 4.0;
      fact *= (2.0 * n - 1.0) * (2.0 * n);
      c[n - 1] = pow4 * (num[n - 1] / den[n - 1]) / fact;
    }
  }
};

}  // namespace

double f_shape(double u) {
  if (!(u >= 0.0)) throw std::domain_error("f_shape: u must be >= 0");
  if (u < 0.5) {
    static const CothSeries series;
    const double u2 = u * u;
    double term = u2, sum = 0.0;
    for (double c : series.c) {
      double t = c * term;
      sum += t;
      if (std::fabs(t) < 1e-17 * std::fabs(sum)) break;
      term *= u2;
    }
    return sum;
  }
  if (u > 20.0) return u - 1.0 + 2.0 * u * std::exp(-2.0 * u);
  return u / std::tanh(u) - 1.0;
}

double log_pin_prefactor(const PinDensityParams& p) {
  if (!(p.delta > 0.0)) throw std::domain_error("pin density: delta = 0 has no density");
  const double h = 0.5 * p.delta;
  return -(h - 1.0) * std::numbers::ln2 - h * std::log(p.r * (1.0 - p.r)) - std::lgamma(h);
}

double pin_prefactor(const PinDensityParams& p) { return std::exp(log_pin_prefactor(p)); }

double pin_density(const PinDensityParams& p, double b) {
  if (!(b >= 0.0)) throw std::domain_error("pin density: b must be >= 0");
  const double lg = log_pin_prefactor(p);
  if (b == 0.0) {
    if (p.delta < 1.0) throw std::domain_error("pin density: diverges at b = 0 for delta < 1");
    return p.delta == 1.0 ? std::exp(lg) : 0.0;
  }
  return std::exp((p.delta - 1.0) * std::log(b) - b * b / p.scale() + lg);
}

double tempered_power_integral(double alpha, double C) {
  if (!(alpha > -2.0 && alpha < -1.0))
    throw std::domain_error("tempered_power_integral: alpha must lie in (-2,-1)");
  if (!(C > 0.0)) throw std::domain_error("tempered_power_integral: C must be > 0");
  return gamma_value(alpha + 1.0) * std::pow(C, -(alpha + 1.0));
}

double tempered_power_integral_squared(double nu, double C) {
  if (!(nu > -3.0 && nu < -1.0))
    throw std::domain_error("tempered_power_integral_squared: nu must lie in (-3,-1)");
  if (!(C > 0.0)) throw std::domain_error("tempered_power_integral_squared: C must be > 0");
  const double e = 0.5 * (nu + 1.0);
  return 0.5 * gamma_value(e) * std::pow(C, -e);
}

double sample_noncentral_chisq(double dof, double noncentrality, RngStream& rng) {
  if (!(dof >= 0.0) || !(noncentrality >= 0.0))
    throw std::domain_error("sample_noncentral_chisq: negative input");
  const double shape = 0.5 * dof + static_cast<double>(rng.poisson(0.5 * noncentrality));
  if (shape == 0.0) return 0.0;
  return rng.gamma(shape, 2.0);
}

}  // namespace ibpf::special
