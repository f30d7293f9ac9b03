#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ibpf/direction.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/quadrature.hpp"

namespace ibpf::verify {

enum class RegimeClass { Sub1, One, OneToThree };

struct Regime {
  double delta = 0.0;
  double kappa = 0.0;   // (delta-1)(delta-3)/4
  int k_index = 0;      // ceil((delta-3)/2)
  RegimeClass cls = RegimeClass::OneToThree;
  static Regime from_delta(double delta);
  std::string name() const;
};

enum class Form { Sigma, Reexpressed };
std::string form_name(Form f);

struct ClosedFormMethod {
  quadrature::QuadratureSpec spec{1e-11, 1e-15, 20000, 1.0};
};

struct MonteCarloMethod {
  std::size_t paths = 1000000;      // LHS paths; the RHS uses as many coupled base draws
  std::size_t grid_points = 257;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int r_nodes = 16;                 // Gauss-Legendre nodes in phi, r = sin^2(phi/2)
  int b_nodes = 8;                  // generalized Gauss-Laguerre nodes in t = b^2 / (2r(1-r))
  std::vector<double> fit_nodes{0.02, 0.05, 0.1, 0.2};  // t-values for G'(0)
  std::size_t chunk = 2048;
};

using Method = std::variant<ClosedFormMethod, MonteCarloMethod>;
std::string method_name(const Method& m);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct LhsResult {
  Estimate dh;     // E d_h Phi
  Estimate h2;     // E <h'', X> Phi
  Estimate total;
};

struct RhsTerm {
  std::string name;
  double value = 0.0;
  double error = 0.0;
};

struct RhsResult {
  Form form = Form::Reexpressed;
  double value = 0.0;
  double quad_error = 0.0;
  double stat_error = 0.0;
  std::vector<RhsTerm> terms;
  std::string remainder_reading;  // "T0", "T2 (order 1 in b^2)", "second derivative"
};

// truncated integrals of the literal T^{-2} reading for delta in (0,1)
struct LiteralReading {
  std::vector<double> eps;
  std::vector<double> values;
  bool diverges = false;
};

struct Tolerances {
  double closed_form_gap = 1e-6;
  double forms_gap = 1e-8;
  double sigma_multiplier = 4.0;
};

struct IbPFReport {
  Regime regime;
  std::string functional;
  std::string direction;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::size_t grid_points = 0;
  LhsResult lhs;
  RhsResult rhs;        // reexpressed form
  RhsResult rhs_sigma;  // Sigma form
  std::optional<LiteralReading> literal_reading;
  double gap = 0.0;
  double forms_gap = 0.0;
  double budget_quad = 0.0;
  double budget_stat = 0.0;
  double budget = 0.0;
  bool pass = false;
  std::vector<std::string> notes;
};

LhsResult ibpf_lhs(const TestFunctional& phi, const Direction& h, const Regime& regime, const Method& method);
RhsResult ibpf_rhs(const TestFunctional& phi, const Direction& h, const Regime& regime, Form form,
                   const Method& method);
IbPFReport verify_identity(const TestFunctional& phi, const Direction& h, const Regime& regime, const Method& method,
                           const Tolerances& tol = {});

// closed-form RHS of the (1,3) formula near delta = 1, extrapolated linearly
// from the probe points to delta -> 1+ and compared with the delta = 1 formula
struct ContinuityProbe {
  std::vector<double> deltas;
  std::vector<double> values;
  double extrapolated = 0.0;
  double at_one = 0.0;
  double gap = 0.0;
  bool pass = false;
};
ContinuityProbe continuity_probe(double lambda, const std::vector<double>& deltas = {1.01, 1.001},
                                 double tol = 1e-4);

// MC-mode quadrature budget from closed-form surrogates run through the same node scheme
double mc_scheme_error(const TestFunctional& surrogate, const Direction& h, const Regime& regime,
                       const MonteCarloMethod& mc);

struct BoundsRow {
  double r = 0.0, b = 0.0;
  double t0 = 0.0, t0_bound = 0.0;   // |T0| vs (L/3) b^2
  double t2 = 0.0, t2_bound = 0.0;   // |T2| vs L2 b^4
  double t0_stat = 0.0, t2_stat = 0.0;
  bool t0_ok = true, t2_ok = true;
};

struct BoundsReport {
  double L = 0.0;
  double L2 = 0.0;
  std::vector<BoundsRow> rows;
  double fitted_M = 0.0;             // smallest M with |T0| <= M L b^2 |log b| on b < 1
  double fitted_M_l2norm = 0.0;      // same for E^0[||X|| | X_r = b], L = 1
  double first_derivative_slope = 0.0;  // min over r of the log-log slope
  double l2norm_slope = 0.0;
  bool pass = false;
};

BoundsReport bounds_suite(const TestFunctional& phi, const Regime& regime, const std::vector<double>& r_grid,
                          const std::vector<double>& b_grid, const Method& method);

// int_0^inf p^delta_r(b) E^delta[exp(-lambda<1,X^2>) | X_r = b] db
double chapman_integral(double delta, double lambda, double r);

struct ConsistencyCheck {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ConsistencyReport {
  std::vector<ConsistencyCheck> checks;
  bool pass() const;
};

ConsistencyReport consistency_suite(const std::vector<double>& deltas, const std::vector<double>& lambda_grid,
                                    const std::vector<double>& r_grid, std::uint64_t seed = 7,
                                    std::size_t mc_paths = 100000, unsigned threads = 1);

}  // namespace ibpf::verify
