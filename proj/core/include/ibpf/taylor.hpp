#pragma once
#include <functional>
#include <optional>
#include <vector>

namespace ibpf::taylor {

struct Smooth1DFunction {
  std::function<double(double)> eval;
  // f(0), f'(0), f''(0), ... when known analytically
  std::optional<std::vector<double>> derivatives_at_zero;
  double fd_step = 1e-3;
};

struct RemainderValue {
  double value = 0.0;
  double error = 0.0;
};

struct DerivativeTable {
  std::vector<double> values;
  std::vector<double> errors;
};

// f^{(j)}(0), j = 0..order; analytic if available, otherwise one-sided differences
// on [0, 4h] with a 4-level Richardson table (f may be undefined left of 0).
DerivativeTable derivatives_at_zero(const Smooth1DFunction& f, int order);

// f(b) - sum_{j<=n} b^j/j! f^{(j)}(0); plain f(b) for n < 0
RemainderValue taylor_remainder(const Smooth1DFunction& f, int n, double b);

// remainder of x -> G(x) of order k evaluated at x = b^2
RemainderValue square_taylor_remainder(const Smooth1DFunction& G, int k, double b);

// square_taylor_remainder / b^{2(k+1)}; uses the Taylor tail when analytic
// derivatives beyond order k are known and the tail is more accurate than
// direct subtraction.
RemainderValue scaled_square_remainder(const Smooth1DFunction& G, int k, double b);

}  // namespace ibpf::taylor
