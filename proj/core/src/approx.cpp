#include "ibpf/approx.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <stdexcept>

#include "ibpf/errors.hpp"

namespace ibpf::approx {

using mp = boost::multiprecision::cpp_bin_float_50;

double bernstein_basis(int k, int m, double y) {
  if (m < 0 || m > k) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (k - m + i) / i;
  return c * std::pow(y, m) * std::pow(1.0 - y, k - m);
}

namespace {

std::vector<double> basis_vector(int k, double y) {
  std::vector<double> b(k + 1);
  for (int m = 0; m <= k; ++m) b[m] = bernstein_basis(k, m, y);
  return b;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

BernsteinApprox::BernsteinApprox(int k, int d, std::vector<double> coeffs) : k_(k), d_(d), coeffs_(std::move(coeffs)) {
  if (k < 1 || d < 1) throw std::domain_error("bernstein: k and d must be >= 1");
  if (coeffs_.size() != ipow(k + 1, d)) throw std::invalid_argument("bernstein: coefficient tensor has wrong size");
}

// contract a tensor with one basis vector per dimension (dimension 0 fastest)
double BernsteinApprox::contract(const std::vector<double>& c, const std::vector<int>& extent,
                                 const std::vector<std::vector<double>>& basis) const {
  std::vector<double> cur = c;
  std::size_t stride_total = cur.size();
  for (int dim = 0; dim < d_; ++dim) {
    const std::size_t e = extent[dim];
    const std::size_t rest = stride_total / e;
    std::vector<double> nxt(rest, 0.0);
    for (std::size_t j = 0; j < rest; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < e; ++m) s += cur[j * e + m] * basis[dim][m];
      nxt[j] = s;
    }
    cur.swap(nxt);
    stride_total = rest;
  }
  return cur[0];
}

double BernsteinApprox::eval(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != d_) throw std::invalid_argument("bernstein eval: dimension mismatch");
  std::vector<std::vector<double>> basis;
  for (int i = 0; i < d_; ++i) basis.push_back(basis_vector(k_, y[i]));
  return contract(coeffs_, std::vector<int>(d_, k_ + 1), basis);
}

double BernsteinApprox::partial(int i, std::span<const double> y) const {
  if (i < 0 || i >= d_) throw std::invalid_argument("bernstein partial: bad index");
  // forward differences along dimension i, scaled by k
  std::vector<int> ext(d_, k_ + 1);
  ext[i] = k_;
  std::size_t total = 1;
  for (int e : ext) total *= e;
  std::vector<double> diff(total);
  const std::size_t n1 = k_ + 1;
  std::vector<int> idx(d_, 0);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin, src = 0, mult = 1;
    for (int dim = 0; dim < d_; ++dim) {
      idx[dim] = static_cast<int>(rem % ext[dim]);
      rem /= ext[dim];
      src += idx[dim] * mult;
      mult *= n1;
    }
    const std::size_t step = ipow(n1, i);
    diff[lin] = k_ * (coeffs_[src + step] - coeffs_[src]);
  }
  std::vector<std::vector<double>> basis;
  for (int dim = 0; dim < d_; ++dim) basis.push_back(basis_vector(dim == i ? k_ - 1 : k_, y[dim]));
  // contract with per-dimension extents
  std::vector<double> cur = diff;
  for (int dim = 0; dim < d_; ++dim) {
    const std::size_t e = ext[dim], rest = cur.size() / e;
    std::vector<double> nxt(rest, 0.0);
    for (std::size_t j = 0; j < rest; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < e; ++m) s += cur[j * e + m] * basis[dim][m];
      nxt[j] = s;
    }
    cur.swap(nxt);
  }
  return cur[0];
}

BernsteinApprox bernstein_fit(const FieldFn& f, int k, int d) {
  if (k < 1 || d < 1) throw std::domain_error("bernstein_fit: k and d must be >= 1");
  const std::size_t total = ipow(k + 1, d);
  std::vector<double> c(total), y(d);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    for (int dim = 0; dim < d; ++dim) {
      y[dim] = static_cast<double>(rem % (k + 1)) / k;
      rem /= (k + 1);
    }
    c[lin] = f(y);
  }
  return BernsteinApprox(k, d, std::move(c));
}

struct ExpSumApprox::Impl {
  int n = 0, k = 0, d = 0;
  std::vector<mp> a;  // monomial coefficients, dimension 0 fastest
  std::vector<ExpTerm> terms;
};

ExpSumApprox::ExpSumApprox(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
int ExpSumApprox::n() const noexcept { return impl_->n; }
int ExpSumApprox::k() const noexcept { return impl_->k; }
int ExpSumApprox::d() const noexcept { return impl_->d; }
const std::vector<ExpTerm>& ExpSumApprox::terms() const noexcept { return impl_->terms; }

namespace {

// nested Horner in y over the coefficient tensor; `deriv` >= 0 differentiates
// in that dimension first
mp horner(const std::vector<mp>& a, int k, int d, std::span<const double> y, int deriv) {
  std::vector<mp> cur = a;
  const std::size_t e = k + 1;
  for (int dim = 0; dim < d; ++dim) {
    const std::size_t rest = cur.size() / e;
    std::vector<mp> nxt(rest);
    const mp yy = y[dim];
    for (std::size_t j = 0; j < rest; ++j) {
      mp acc = 0;
      if (dim == deriv) {
        for (int m = k; m >= 1; --m) acc = acc * yy + cur[j * e + m] * m;
      } else {
        for (int m = k; m >= 0; --m) acc = acc * yy + cur[j * e + m];
      }
      nxt[j] = acc;
    }
    cur.swap(nxt);
  }
  return cur[0];
}

}  // namespace

double ExpSumApprox::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != impl_->d) throw std::invalid_argument("exp-sum eval: dimension mismatch");
  if (impl_->terms.empty()) return 0.0;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(-x[i]);
  return static_cast<double>(horner(impl_->a, impl_->k, impl_->d, y, -1));
}

double ExpSumApprox::partial(int i, std::span<const double> x) const {
  if (static_cast<int>(x.size()) != impl_->d || i < 0 || i >= impl_->d)
    throw std::invalid_argument("exp-sum partial: bad index or dimension");
  if (impl_->terms.empty()) return 0.0;
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) y[j] = std::exp(-x[j]);
  // d/dx_i = -y_i d/dy_i
  return -y[i] * static_cast<double>(horner(impl_->a, impl_->k, impl_->d, y, i));
}

double ExpSumApprox::eval_naive(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : impl_->terms) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e += t.rate[i] * x[i];
    s += t.coefficient * std::exp(-e);
  }
  return s;
}

ExpSumApprox exp_sum_lift(const FieldFn& h, int n, int k, int d, std::size_t max_terms) {
  if (n < 1 || k < 1 || d < 1) throw std::domain_error("exp_sum_lift: n, k, d must be >= 1");
  const std::size_t e = k + 1;
  const std::size_t total = ipow(e, d);
  if (total > max_terms || d > 8) throw ResourceError("exp_sum_lift: (k+1)^d terms exceed the budget");
  auto impl = std::make_shared<ExpSumApprox::Impl>();
  impl->n = n;
  impl->k = k;
  impl->d = d;
  // f(l/k) = h(-ln(l/k)); any zero coordinate lies at x = +inf where h vanishes
  impl->a.resize(total);
  std::vector<double> x(d);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    bool zero = false;
    for (int dim = 0; dim < d; ++dim) {
      const std::size_t l = rem % e;
      rem /= e;
      if (l == 0) zero = true;
      x[dim] = -std::log(static_cast<double>(l) / k);
    }
    impl->a[lin] = zero ? mp(0) : mp(h(x));
  }
  // per dimension: a_j = C(k,j) * (j-th forward difference of f at 0)
  std::vector<mp> binom(e);
  binom[0] = 1;
  for (int j = 1; j <= k; ++j) binom[j] = binom[j - 1] * (k - j + 1) / j;
  std::size_t stride = 1;
  std::vector<mp> line(e), out(e);
  for (int dim = 0; dim < d; ++dim) {
    for (std::size_t base = 0; base < total; ++base) {
      if ((base / stride) % e != 0) continue;
      for (std::size_t m = 0; m < e; ++m) line[m] = impl->a[base + m * stride];
      // successive differences in place: after pass j, line[j] holds Delta^j f(0)
      for (std::size_t j = 1; j < e; ++j)
        for (std::size_t m = e - 1; m >= j; --m) line[m] = line[m] - line[m - 1];
      for (std::size_t j = 0; j < e; ++j) impl->a[base + j * stride] = binom[j] * line[j];
    }
    stride *= e;
  }
  for (std::size_t lin = 0; lin < total; ++lin) {
    if (impl->a[lin] == 0) continue;
    ExpTerm t{static_cast<double>(impl->a[lin]), std::vector<int>(d)};
    std::size_t rem = lin;
    for (int dim = 0; dim < d; ++dim) {
      t.rate[dim] = static_cast<int>(rem % e);
      rem /= e;
    }
    impl->terms.push_back(std::move(t));
  }
  return ExpSumApprox(std::move(impl));
}

double cutoff_chi(double t) {
  if (t <= -1.0) return 1.0;
  if (t >= 0.0) return 0.0;
  const double s = -t;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double cutoff_chi_derivative(double t) {
  if (t <= -1.0 || t >= 0.0) return 0.0;
  const double s = -t;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s);
}

std::vector<double> cell_projections(int d, std::span<const double> times, std::span<const double> sq) {
  std::vector<double> out(d);
  const double sd = std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    std::vector<double> lv(d, 0.0);
    lv[i] = sd;
    std::vector<double> br(d + 1);
    for (int j = 0; j <= d; ++j) br[j] = static_cast<double>(j) / d;
    out[i] = ThetaProfile(br, lv).pairing(times, sq);
  }
  return out;
}

TestFunctional build_S_approximation(const TestFunctional& phi, int d, int n, int k) {
  const auto* sc = std::get_if<SquareComposed>(&phi.variant);
  if (!sc) throw UsageError("build_S_approximation: needs a square-composed functional");
  if (d < 1 || n < 1 || k < 1) throw std::domain_error("build_S_approximation: d, n, k must be >= 1");
  auto psi = sc->psi;
  // sum_i x_i zeta_i is the step profile sqrt(d) x_i on cell i; repeated
  // times encode the jumps
  std::vector<double> times;
  for (int i = 0; i < d; ++i) {
    times.push_back(static_cast<double>(i) / d);
    times.push_back(static_cast<double>(i + 1) / d);
  }
  auto h = [psi, times, d, n](std::span<const double> x) {
    double cut = 1.0;
    for (double xi : x) cut *= cutoff_chi(xi - n);
    if (cut == 0.0) return 0.0;
    std::vector<double> vals;
    const double sd = std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) {
      vals.push_back(sd * x[i]);
      vals.push_back(sd * x[i]);
    }
    return psi(ProfileView{times, vals}) * cut;
  };
  auto lift = std::make_shared<const ExpSumApprox>(exp_sum_lift(h, n, k, d));
  TestFunctional out{ExpSumFunctional{lift, sc->bound},
                     "S-approximation d=" + std::to_string(d) + " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                         " of " + phi.description};
  return out;
}

TestFunctional smooth_shift(const TestFunctional& phi, int m) {
  const auto* gc = std::get_if<GeneralC1b>(&phi.variant);
  if (!gc) throw UsageError("smooth_shift: needs a general C1b functional");
  if (m < 1) throw std::domain_error("smooth_shift: m must be >= 1");
  auto eval = gc->eval;
  const double shift = 1.0 / m;
  SquareComposed sc;
  sc.psi = [eval, shift](const ProfileView& z) {
    std::vector<double> x(z.values.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sqrt(std::fabs(z.values[i] + shift));
    return eval(ProfileView{z.times, x});
  };
  sc.lip_L = gc->c1_norm;  // in the ||.||_1^{1/2} sense
  sc.bound = gc->bound;
  return {sc, "shifted m=" + std::to_string(m) + " of " + phi.description};
}

bool DominationReport::pass() const {
  for (const auto& r : rows)
    if (!(r.sup_pass && r.pointwise_pass && r.deriv_pass && r.lip_pass)) return false;
  return true;
}

DominationReport domination_suite(const std::function<double(double)>& h, const std::function<double(double)>& dh,
                                  double lip_dh, int n, const std::vector<int>& k_list,
                                  const std::vector<double>& grid) {
  DominationReport rep;
  rep.n = n;
  std::vector<double> hv(grid.size()), dhv(grid.size());
  double sup_h = 0.0, sup_dh = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    hv[i] = h(grid[i]);
    dhv[i] = dh(grid[i]);
    sup_h = std::max(sup_h, std::fabs(hv[i]));
    sup_dh = std::max(sup_dh, std::fabs(dhv[i]));
  }
  const double tol = 1e-13;
  for (int k : k_list) {
    DominationRow row;
    row.k = k;
    row.sup_h = sup_h;
    row.sup_dh = sup_dh;
    auto fit = bernstein_fit(
        [&](std::span<const double> y) { return y[0] <= 0.0 ? 0.0 : h(-std::log(y[0])); }, k, 1);
    std::vector<double> dk(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double y = std::exp(-grid[i]);
      const double v = fit.eval(std::span<const double>(&y, 1));
      dk[i] = -y * fit.partial(0, std::span<const double>(&y, 1));
      row.sup_hk = std::max(row.sup_hk, std::fabs(v));
      row.sup_gap = std::max(row.sup_gap, std::fabs(v - hv[i]));
      row.sup_dhk = std::max(row.sup_dhk, std::fabs(dk[i]));
      const double excess = std::fabs(v) - std::fabs(hv[i]);
      if (excess > tol) {
        ++row.pointwise_violations;
        if (excess > row.worst_pointwise_excess) {
          row.worst_pointwise_excess = excess;
          row.worst_pointwise_x = grid[i];
        }
      }
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double dx = grid[i + 1] - grid[i];
      if (dx > 0.0) row.lip_dhk = std::max(row.lip_dhk, std::fabs(dk[i + 1] - dk[i]) / dx);
    }
    row.deriv_constant = std::exp(static_cast<double>(n));
    row.lip_constant = 2.0 * std::exp(2.0 * (n + 1)) * (lip_dh + sup_dh);
    row.deriv_ratio = sup_dh > 0.0 ? row.sup_dhk / sup_dh : (row.sup_dhk > 0.0 ? INFINITY : 0.0);
    row.lip_ratio = row.lip_constant > 0.0 ? row.lip_dhk / row.lip_constant : (row.lip_dhk > 0.0 ? INFINITY : 0.0);
    row.sup_pass = row.sup_hk <= sup_h + tol;
    row.pointwise_pass = row.pointwise_violations == 0;
    row.deriv_pass = row.sup_dhk <= row.deriv_constant * sup_dh + tol;
    row.lip_pass = row.lip_dhk <= row.lip_constant + tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ibpf::approx
