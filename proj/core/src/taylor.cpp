#include "ibpf/taylor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ibpf/errors.hpp"

namespace ibpf::taylor {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// j-th forward difference quotient at 0 with step h
double forward_quotient(const std::function<double(double)>& f, int j, double h) {
  double s = 0.0;
  for (int i = 0; i <= j; ++i) {
    double sign = ((j - i) % 2 == 0) ? 1.0 : -1.0;
    s += sign * binom(j, i) * f(i * h);
  }
  return s / std::pow(h, j);
}

struct Richardson {
  double value;
  double error;
};

Richardson richardson(const std::function<double(double)>& f, int j, double h0) {
  constexpr int L = 4;
  double T[L][L];
  double h = h0;
  for (int i = 0; i < L; ++i, h *= 0.5) {
    T[i][0] = forward_quotient(f, j, h);
    double fac = 1.0;
    for (int m = 1; m <= i; ++m) {
      fac *= 2.0;  // error expansion in integer powers of h
      T[i][m] = T[i][m - 1] + (T[i][m - 1] - T[i - 1][m - 1]) / (fac - 1.0);
    }
  }
  double v = T[L - 1][L - 1];
  double e = std::max(std::fabs(v - T[L - 2][L - 2]), std::fabs(v - T[L - 1][L - 2]));
  return {v, e};
}

}  // namespace

DerivativeTable derivatives_at_zero(const Smooth1DFunction& f, int order) {
  DerivativeTable out;
  if (order < 0) return out;
  if (f.derivatives_at_zero && static_cast<int>(f.derivatives_at_zero->size()) > order) {
    out.values.assign(f.derivatives_at_zero->begin(), f.derivatives_at_zero->begin() + order + 1);
    out.errors.assign(order + 1, 0.0);
    return out;
  }
  if (!f.eval) throw std::invalid_argument("taylor: function has no evaluator");
  if (!(f.fd_step > 0.0)) throw std::domain_error("taylor: fd_step must be positive");
  out.values.push_back(f.eval(0.0));
  out.errors.push_back(0.0);
  for (int j = 1; j <= order; ++j) {
    auto rr = richardson(f.eval, j, f.fd_step);
    if (!std::isfinite(rr.value) || rr.error > 1e-2 * std::max(1.0, std::fabs(rr.value)))
      throw NumericError("taylor: Richardson table for derivative " + std::to_string(j) +
                             " did not converge",
                         rr.value, rr.error);
    out.values.push_back(rr.value);
    out.errors.push_back(rr.error);
  }
  return out;
}

namespace {

RemainderValue remainder_impl(const Smooth1DFunction& f, int n, double t) {
  double ft = f.eval(t);
  if (n < 0) return {ft, 0.0};
  auto d = derivatives_at_zero(f, n);
  double s = 0.0, err = 0.0, p = 1.0, fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      p *= t;
      fact *= j;
    }
    s += d.values[j] * p / fact;
    err += d.errors[j] * p / fact;
  }
  return {ft - s, err};
}

}  // namespace

RemainderValue taylor_remainder(const Smooth1DFunction& f, int n, double b) {
  if (!(b >= 0.0)) throw std::domain_error("taylor_remainder: b must be >= 0");
  return remainder_impl(f, n, b);
}

RemainderValue square_taylor_remainder(const Smooth1DFunction& G, int k, double b) {
  if (!(b >= 0.0)) throw std::domain_error("square_taylor_remainder: b must be >= 0");
  if (k < 0) throw std::domain_error("square_taylor_remainder: k must be >= 0");
  return remainder_impl(G, k, b * b);
}

RemainderValue scaled_square_remainder(const Smooth1DFunction& G, int k, double b) {
  if (!(b > 0.0)) throw std::domain_error("scaled_square_remainder: b must be > 0");
  if (k < 0) throw std::domain_error("scaled_square_remainder: k must be >= 0");
  const double x = b * b;
  const double xk = std::pow(x, k + 1);
  const int known = G.derivatives_at_zero ? static_cast<int>(G.derivatives_at_zero->size()) : 0;

  if (known > k + 1) {
    const auto& d = *G.derivatives_at_zero;
    // tail sum_{j>k} d_j x^{j-k-1}/j!
    double fact = 1.0;
    for (int j = 1; j <= k + 1; ++j) fact *= j;
    double s = 0.0, p = 1.0, last = 0.0;
    for (int j = k + 1; j < known; ++j) {
      if (j > k + 1) {
        fact *= j;
        p *= x;
      }
      last = d[j] * p / fact;
      s += last;
    }
    double tail_err = std::fabs(last) * x + kEps * std::fabs(s);
    // cost of the direct route: cancellation against |G(x)| and the polynomial
    double g = G.eval(x);
    double direct_err = 4.0 * kEps * (std::fabs(g) + std::fabs(d[0])) / xk;
    if (tail_err <= direct_err || !std::isfinite(direct_err)) return {s, tail_err};
    auto r = remainder_impl(G, k, x);
    return {r.value / xk, r.error / xk};
  }
  auto r = remainder_impl(G, k, x);
  return {r.value / xk, r.error / xk};
}

}  // namespace ibpf::taylor
