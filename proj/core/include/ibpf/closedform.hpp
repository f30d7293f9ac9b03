#pragma once
#include <cstdint>

#include "ibpf/functionals.hpp"
#include "ibpf/theta.hpp"

namespace ibpf::closedform {

struct SinhBridgeTransform {
  double delta;
  double lambda;
  double s;  // sqrt(2 lambda)
  static SinhBridgeTransform make(double delta, double lambda);
  double value() const;  // (s / sinh s)^{delta/2}
};

double bridge_laplace(double delta, double lambda);
double bridge_laplace(double delta, const ThetaProfile& theta);

// f(sr)/r + f(s(1-r))/(1-r)
double c_coeff(double r, double lambda);

// E^delta[exp(-<theta,X^2>) | X_r = b] = A exp(-C b^2 / 2)
struct PinnedParts {
  double A;
  double C;
  double at(double b) const;
};
PinnedParts pinned_parts(double delta, const ThetaProfile& theta, double r);
double pinned_laplace(double delta, double lambda, double r, double b);
double pinned_laplace(double delta, const ThetaProfile& theta, double r, double b);

// gamma(r,b) = p^delta_r(b) / b^{delta-1}
double gamma_factor(double delta, double r, double b);
double gamma_factor_zero(double delta, double r);

struct McOptions {
  std::size_t paths = 100000;
  std::size_t grid_points = 1025;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// gamma(r,b) E^delta[Phi | X_r = b], closed form for ExpQuadratic, Monte Carlo otherwise
double sigma_value(double delta, double r, const TestFunctional& phi, double b, const McOptions& mc = {});

// int (1 - e^{-lambda ||X||_1}) dM^r = c_coeff / 2
double levy_exponent(double lambda, double r);

// E^0[||X|| | X_r = b]
double pinned_mean_l2norm(double r, double b);

struct DerivativesAtZero {
  double G0 = 0.0;
  double G1 = 0.0;          // dG/dx at 0, x = b^2
  double d2_in_b = 0.0;     // 2 G1
  double first_in_b = 0.0;  // identically 0
  double G1_error = 0.0;    // statistical, Monte Carlo route only
};

struct FitOptions {
  McOptions mc{200000, 257, 1, 1};
  std::vector<double> x_nodes{0.0125, 0.025, 0.05, 0.1};  // in units of 2r(1-r)
};

DerivativesAtZero derivatives_at_zero(double delta, double r, const TestFunctional& phi, const FitOptions& opt = {});

}  // namespace ibpf::closedform
