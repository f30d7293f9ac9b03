#include "ibpf/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "ibpf/errors.hpp"
#include "ibpf/special.hpp"

namespace ibpf::quadrature {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::domain_error("quadrature: tolerances must be positive");
  if (max_panels < 8) throw std::domain_error("quadrature: max_panels must be >= 8");
  if (!(b_split > 0.0)) throw std::domain_error("quadrature: b_split must be positive");
}

double pairwise_sum(const std::vector<double>& v) {
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += v[i];
      return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  return rec(rec, 0, v.size());
}

namespace {

// QUADPACK qk15 abscissae and weights
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, err;
};

Panel gk15(const Fn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * wgk[7], resg = fc * wg[3], resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    resk += wgk[j] * (fv1[j] + fv2[j]);
    resabs += wgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * (fv1[j] + fv2[j]);
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  resk *= h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double err = std::fabs((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) throw NumericError("quadrature: non-finite integrand value");
  return {a, b, resk, err};
}

}  // namespace

QuadResult integrate(const Fn& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (a == b) return {0.0, 0.0, 0};
  auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  Panel first = gk15(f, a, b);
  heap.push(first);
  double total = first.value, err = first.err;
  int panels = 1;
  while (err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
    if (panels >= spec.max_panels) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
    heap.pop();
    Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<double> vals, errs;
  for (const auto& p : all) {
    vals.push_back(p.value);
    errs.push_back(p.err);
  }
  QuadResult res{pairwise_sum(vals), pairwise_sum(errs), panels};
  if (res.err_est > std::max(spec.abs_tol, spec.rel_tol * std::fabs(res.value)) &&
      res.err_est > 1e3 * std::numeric_limits<double>::epsilon() * std::fabs(res.value))
    throw NumericError("quadrature: tolerance not reached within max_panels", res.value, res.err_est);
  return res;
}

QuadResult integrate_gaussian_tail(const Fn& f, double a, double width, const QuadratureSpec& spec) {
  if (!(width > 0.0)) throw std::domain_error("quadrature: width must be positive");
  QuadResult out;
  std::vector<double> vals, errs;
  double lo = a;
  for (int i = 0; i < 400; ++i) {
    const double hi = lo + width;
    auto p = integrate(f, lo, hi, spec);
    vals.push_back(p.value);
    errs.push_back(p.err_est);
    out.panels += p.panels;
    // what is left beyond hi is at most |f(hi)| * width^2 / (2 hi) for e^{-b^2/width^2} decay
    const double fh = std::fabs(f(hi));
    const double bound = fh * width * width / (2.0 * std::max(hi, width));
    lo = hi;
    if (hi > 2.0 * width && bound < 0.1 * spec.abs_tol && std::fabs(p.value) < spec.abs_tol) break;
  }
  out.value = pairwise_sum(vals);
  out.err_est = pairwise_sum(errs);
  return out;
}

namespace {

// int_B^inf b^{delta-4} F(b) db for bounded F: b = B t^{-1/(3-delta)} makes the
// power weight a constant density on (0,1]
QuadResult algebraic_tail(double delta, const Fn& F, double B, const QuadratureSpec& spec) {
  const double q = 3.0 - delta;
  if (!(q > 0.0)) throw std::domain_error("quadrature: b^{delta-4} tail needs delta < 3");
  const double pref = std::pow(B, -q) / q;
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double b = B * std::pow(t, -1.0 / q);
    if (!std::isfinite(b)) return 0.0;
    return F(b) * pref;
  };
  return integrate(g, 0.0, 1.0, spec);
}

}  // namespace

QuadResult integrate_b_remainder(double delta, const Fn& weight, const Fn& remainder,
                                 const QuadratureSpec& spec, double width) {
  spec.validate();
  auto f = [&](double b) {
    if (b <= 0.0) return 0.0;
    double r = remainder(b);
    if (r == 0.0) return 0.0;
    return std::pow(b, delta - 4.0) * weight(b) * r;
  };
  const double split = spec.b_split * width;
  QuadratureSpec inner = spec;
  inner.abs_tol = spec.abs_tol * 0.1;
  std::vector<double> vals, errs;
  int panels = 0;
  // graded panels [split 2^{-j-1}, split 2^{-j}]
  double hi = split, prev = 0.0, tail = 0.0;
  bool done = false;
  for (int j = 0; j < 1000 && !done; ++j) {
    const double lo = 0.5 * hi;
    auto p = integrate(f, lo, hi, inner);
    vals.push_back(p.value);
    errs.push_back(p.err_est);
    panels += p.panels;
    if (j >= 3 && prev != 0.0) {
      const double rho = std::fabs(p.value / prev);
      if (rho < 0.999) {
        tail = std::fabs(p.value) * rho / (1.0 - rho);
        if (tail < std::max(spec.abs_tol, spec.rel_tol * std::fabs(pairwise_sum(vals)))) done = true;
      }
    }
    if (p.value == 0.0 && j >= 3) done = true;
    prev = p.value;
    hi = lo;
  }
  if (!done) throw NumericError("quadrature: graded panels did not converge toward b = 0", pairwise_sum(vals), tail);
  std::reverse(vals.begin(), vals.end());
  std::reverse(errs.begin(), errs.end());
  auto up = algebraic_tail(delta, [&](double b) { return weight(b) * remainder(b); }, split, spec);
  vals.push_back(up.value);
  errs.push_back(up.err_est + tail);
  return {pairwise_sum(vals), pairwise_sum(errs), panels + up.panels};
}

QuadResult integrate_b_scaled(double delta, int m, const Fn& weight, const Fn& scaled,
                              const QuadratureSpec& spec, double width) {
  spec.validate();
  const double beta = delta - 4.0 + m;
  if (!(beta > -1.0)) throw std::domain_error("quadrature: b^{delta-4+m} not integrable at 0");
  const double split = spec.b_split * width;
  const double p1 = beta + 1.0;
  // b = t^{1/(beta+1)}, b^beta db = dt/(beta+1)
  auto g = [&](double t) {
    if (t <= 0.0) return weight(0.0) * scaled(0.0) / p1;
    const double b = std::pow(t, 1.0 / p1);
    return weight(b) * scaled(b) / p1;
  };
  auto lower = integrate(g, 0.0, std::pow(split, p1), spec);
  auto upper = algebraic_tail(
      delta, [&](double b) { return std::pow(b, static_cast<double>(m)) * weight(b) * scaled(b); }, split, spec);
  return {lower.value + upper.value, lower.err_est + upper.err_est, lower.panels + upper.panels};
}

QuadResult integrate_r_weighted(const Direction& h, double power, const Fn& g,
                                const QuadratureSpec& spec, const std::vector<double>& breakpoints) {
  if (!(h.endpoint_order > power - 1.0))
    throw std::domain_error("integrate_r_weighted: direction does not vanish fast enough at the endpoints");
  std::vector<double> cuts{0.0};
  for (double r : breakpoints)
    if (r > 0.0 && r < 1.0) cuts.push_back(2.0 * std::asin(std::sqrt(r)));
  cuts.push_back(std::numbers::pi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double c4 = std::pow(4.0, power);
  auto f = [&](double phi) {
    const double s = std::sin(phi);
    if (s <= 0.0) return 0.0;
    const double sh = std::sin(0.5 * phi);
    const double r = sh * sh;
    if (r <= 0.0 || r >= 1.0) return 0.0;
    const double hv = h.eval(r);
    if (hv == 0.0) return 0.0;
    return hv * c4 * 0.5 * std::pow(s, 1.0 - 2.0 * power) * g(r);
  };
  std::vector<double> vals, errs;
  int panels = 0;
  QuadratureSpec piece = spec;
  piece.abs_tol = spec.abs_tol / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = integrate(f, cuts[i], cuts[i + 1], piece);
    vals.push_back(p.value);
    errs.push_back(p.err_est);
    panels += p.panels;
  }
  return {pairwise_sum(vals), pairwise_sum(errs), panels};
}

namespace {

GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag(i);
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = off(i);
  }
  es.compute(J);
  if (es.info() != Eigen::Success) throw NumericError("quadrature: Golub-Welsch eigensolver failed");
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v * v);
  }
  return rule;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), o(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) o(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  auto rule = golub_welsch(d, o, 2.0);
  // polish nodes with Newton on P_n for full accuracy
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i], dp = 1.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

GaussRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::domain_error("gauss_laguerre: n must be >= 1");
  if (!(alpha > -1.0)) throw std::domain_error("gauss_laguerre: alpha must be > -1");
  Eigen::VectorXd d(n), o(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) d(i) = 2.0 * i + alpha + 1.0;
  for (int i = 1; i < n; ++i) o(i - 1) = std::sqrt(i * (i + alpha));
  return golub_welsch(d, o, std::exp(std::lgamma(alpha + 1.0)));
}

}  // namespace ibpf::quadrature
