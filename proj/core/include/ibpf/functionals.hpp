#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ibpf/direction.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/theta.hpp"

namespace ibpf {

namespace approx {
class ExpSumApprox;
}

// A nonnegative profile on [0,1] sampled at nondecreasing times; a repeated
// time encodes a jump, and integrals use the piecewise-linear interpolant.
struct ProfileView {
  std::span<const double> times;
  std::span<const double> values;
};

// exp(-<theta, X^2>)
struct ExpQuadratic {
  ThetaProfile theta;
};

// Psi(X^2) with Psi Lipschitz for ||.||_1
struct SquareComposed {
  std::function<double(const ProfileView&)> psi;
  // optional exact differential DPsi(Z)[H], H given at the nodes of Z
  std::function<double(const ProfileView&, std::span<const double>)> differential;
  double lip_L = 0.0;
  std::optional<double> double_increment_L;
  double bound = 0.0;
};

// Phi(X) on the unsquared path
struct GeneralC1b {
  std::function<double(const ProfileView&)> eval;
  std::function<double(const ProfileView&, std::span<const double>)> directional;  // (X, h at nodes)
  double c1_norm = 0.0;
  double bound = 0.0;
};

// sum_j c_j prod_i exp(-rate_ij <zeta_i, X^2>), zeta_i = sqrt(d) 1_{cell i}:
// a finite combination of ExpQuadratic with piecewise-constant theta
struct ExpSumFunctional {
  std::shared_ptr<const approx::ExpSumApprox> sum;
  double bound = 0.0;
};

struct TestFunctional {
  std::variant<ExpQuadratic, SquareComposed, GeneralC1b, ExpSumFunctional> variant;
  std::string description;

  bool is_exp_quadratic() const { return std::holds_alternative<ExpQuadratic>(variant); }
  double bound() const;
};

TestFunctional make_exp_quadratic(const ThetaProfile& theta);
// cos(<theta,Z>) exp(-<theta,Z>), the benchmark outside the exponential class
TestFunctional make_expcos(const ThetaProfile& theta);
// "exp:lambda=1.0", "expcos:lambda=0.5", "piecewise:0,0.5,1;levels=1,2", "one"
TestFunctional parse_functional(const std::string& spec);

// Evaluation on a squared path (values are X^2)
double evaluate(const TestFunctional& phi, const SquaredBridgePath& path);
double evaluate_squared(const TestFunctional& phi, std::span<const double> times, std::span<const double> sq);

struct DirectionalValue {
  double value = 0.0;
  double error = 0.0;
};
// d/de Phi(X + e h) at e = 0, X = sqrt(path)
DirectionalValue directional_derivative(const TestFunctional& phi, const SquaredBridgePath& path, const Direction& h);
DirectionalValue directional_derivative_squared(const TestFunctional& phi, std::span<const double> times,
                                                std::span<const double> sq, std::span<const double> h_nodes);

struct RegularityConfig {
  std::size_t pairs = 1000;
  std::size_t grid_points = 129;
  std::vector<double> deltas{0.5, 1.5, 2.5};
};

struct RegularityReport {
  double declared_lip = 0.0;
  double max_lip_ratio = 0.0;
  std::optional<double> declared_double;
  double max_double_ratio = 0.0;
  std::size_t samples = 0;
  std::size_t lip_witness = 0;
  std::size_t double_witness = 0;
  bool pass = true;
};

RegularityReport regularity_check(const TestFunctional& phi, const RegularityConfig& cfg, RngStream& rng);

}  // namespace ibpf
