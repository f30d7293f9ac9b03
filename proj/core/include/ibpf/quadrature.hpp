#pragma once
#include <functional>
#include <vector>

#include "ibpf/direction.hpp"

namespace ibpf::quadrature {

using Fn = std::function<double(double)>;

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int max_panels = 4000;
  double b_split = 1.0;  // in units of the Gaussian width passed to the b-integrators
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  int panels = 0;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a,b]; deterministic pairwise summation.
QuadResult integrate(const Fn& f, double a, double b, const QuadratureSpec& spec);

// [a, inf) for integrands with Gaussian decay of width `width`: panels of one
// width until the Mills-ratio bound on what is left drops below abs_tol.
QuadResult integrate_gaussian_tail(const Fn& f, double a, double width, const QuadratureSpec& spec);

// int_0^inf b^{delta-4} weight(b) remainder(b) db, remainder of unknown small-b
// order: geometrically graded panels toward 0 with a geometric tail estimate.
// weight*remainder only needs to stay bounded at infinity; `width` sets the
// split point b_split * width.
QuadResult integrate_b_remainder(double delta, const Fn& weight, const Fn& remainder,
                                 const QuadratureSpec& spec, double width = 1.0);

// Same integral when remainder(b) = b^m * scaled(b) with scaled bounded near 0:
// on [0, split] the substitution t = b^{beta+1}, beta = delta-4+m, removes the
// endpoint singularity.
QuadResult integrate_b_scaled(double delta, int m, const Fn& weight, const Fn& scaled,
                              const QuadratureSpec& spec, double width = 1.0);

// int_0^1 h(r) (r(1-r))^{-power} g(r) dr with r = sin^2(phi/2); breakpoints of g
// in (0,1) become panel boundaries.
QuadResult integrate_r_weighted(const Direction& h, double power, const Fn& g,
                                const QuadratureSpec& spec,
                                const std::vector<double>& breakpoints = {});

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);                 // on [-1,1]
GaussRule gauss_laguerre(int n, double alpha);   // weight t^alpha e^{-t} on (0,inf)

double pairwise_sum(const std::vector<double>& v);

}  // namespace ibpf::quadrature
