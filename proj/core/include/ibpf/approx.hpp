#pragma once
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ibpf/functionals.hpp"

namespace ibpf::approx {

using FieldFn = std::function<double(std::span<const double>)>;

double bernstein_basis(int k, int m, double y);

class BernsteinApprox {
 public:
  BernsteinApprox(int k, int d, std::vector<double> coeffs);
  int k() const noexcept { return k_; }
  int d() const noexcept { return d_; }
  // f(l/k), multi-index l flattened with dimension 0 fastest
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  double eval(std::span<const double> y) const;
  // summation-by-parts form: k sum (f(l+e_i) - f(l)) B^{k-1}_{l_i} prod_{j!=i} B^k_{l_j}
  double partial(int i, std::span<const double> y) const;

 private:
  double contract(const std::vector<double>& c, const std::vector<int>& extent,
                  const std::vector<std::vector<double>>& basis) const;
  int k_, d_;
  std::vector<double> coeffs_;
};

BernsteinApprox bernstein_fit(const FieldFn& f, int k, int d);

struct ExpTerm {
  double coefficient;      // rounded; the evaluator uses the extended-precision value
  std::vector<int> rate;   // x -> exp(-rate . x)
};

// h_k(x) = P_k f(e^{-x}) expanded into exponentials with integer rates.
// The alternating binomial expansion cancels heavily for large k, so the
// coefficients are held and evaluated in 50-digit binary floating point.
class ExpSumApprox {
 public:
  struct Impl;
  explicit ExpSumApprox(std::shared_ptr<const Impl> impl);

  int n() const noexcept;
  int k() const noexcept;
  int d() const noexcept;
  const std::vector<ExpTerm>& terms() const noexcept;

  double eval(std::span<const double> x) const;
  double partial(int i, std::span<const double> x) const;
  double eval_naive(std::span<const double> x) const;  // plain double sum over terms()

 private:
  std::shared_ptr<const Impl> impl_;
};

ExpSumApprox exp_sum_lift(const FieldFn& h, int n, int k, int d, std::size_t max_terms = 4'000'000);

// 1 on (-inf,-1], 0 on [0,inf), quintic smoothstep between
double cutoff_chi(double t);
double cutoff_chi_derivative(double t);

// Phi^d_{n,k}: project X^2 on sqrt(d) 1_cell, cut off with chi(x_i - n), lift
TestFunctional build_S_approximation(const TestFunctional& phi, int d, int n, int k);
// the zeta-projections <zeta_i, X^2>
std::vector<double> cell_projections(int d, std::span<const double> times, std::span<const double> sq);

// Phi^m(X) = Phi(sqrt(X^2 + 1/m))
TestFunctional smooth_shift(const TestFunctional& phi, int m);

struct DominationRow {
  int k = 0;
  double sup_h = 0.0, sup_hk = 0.0, sup_gap = 0.0;
  std::size_t pointwise_violations = 0;
  double worst_pointwise_x = 0.0, worst_pointwise_excess = 0.0;
  double sup_dh = 0.0, sup_dhk = 0.0, deriv_ratio = 0.0, deriv_constant = 0.0;
  double lip_dhk = 0.0, lip_constant = 0.0, lip_ratio = 0.0;
  bool sup_pass = false, pointwise_pass = false, deriv_pass = false, lip_pass = false;
};

struct DominationReport {
  int n = 0;
  std::vector<DominationRow> rows;
  bool pass() const;
};

// One-dimensional grid verification of the appendix dominations for h
// supported in [0,n] with derivative dh; lip_dh is a Lipschitz constant of dh.
DominationReport domination_suite(const std::function<double(double)>& h,
                                  const std::function<double(double)>& dh, double lip_dh, int n,
                                  const std::vector<int>& k_list, const std::vector<double>& grid);

}  // namespace ibpf::approx
