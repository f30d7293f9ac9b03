#pragma once

namespace ibpf {
class RngStream;

namespace special {

struct PinDensityParams {
  double delta;
  double r;
  static PinDensityParams make(double delta, double r);  // validates
  double scale() const noexcept { return 2.0 * r * (1.0 - r); }
};

struct SignedLogGamma {
  int sign;
  double log_abs;
  double value() const;
};

double log_gamma(double x);
SignedLogGamma gamma_signed(double x);
double gamma_value(double x);  // signed Gamma, any non-pole argument

// u*coth(u) - 1
double f_shape(double u);

// p^delta_r(b) and its b^{delta-1}-stripped prefactor at b = 0
double pin_density(const PinDensityParams& p, double b);
double log_pin_prefactor(const PinDensityParams& p);
double pin_prefactor(const PinDensityParams& p);

// int_0^inf x^alpha (e^{-Cx} - 1) dx, alpha in (-2,-1)
double tempered_power_integral(double alpha, double C);
// int_0^inf b^nu (e^{-C b^2} - 1) db, nu in (-3,-1)
double tempered_power_integral_squared(double nu, double C);

double sample_noncentral_chisq(double dof, double noncentrality, RngStream& rng);

}  // namespace special
}  // namespace ibpf
