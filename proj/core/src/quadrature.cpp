#include "xxhydro/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace xxhydro {

namespace bq = boost::math::quadrature;

std::vector<double> clean_breaks(std::vector<double> breaks, double a, double b) {
  std::vector<double> out;
  const double eps = 1e-14 * std::max(1.0, b - a);
  for (double p : breaks)
    if (std::isfinite(p) && p > a + eps && p < b - eps) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [eps](double u, double v) { return std::abs(u - v) <= eps; }),
            out.end());
  return out;
}

namespace {

std::vector<double> nodes(double a, double b, const std::vector<double>& breaks,
                          double max_panel) {
  std::vector<double> edges{a};
  for (double p : clean_breaks(breaks, a, b)) edges.push_back(p);
  edges.push_back(b);
  std::vector<double> out{a};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const int panels =
        max_panel > 0 ? std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel))) : 1;
    for (int p = 1; p <= panels; ++p)
      out.push_back(p == panels ? hi : lo + (hi - lo) * p / panels);
  }
  return out;
}

}  // namespace

namespace {

struct Panel {
  double err = 0.0;
  double l1 = 0.0;
};

// Boost reports the error of the rule mapped to [-1, 1]; rescale it to [a, b]
// like the value and the L1 norm.
template <class F>
auto gk(const F& f, double a, double b, Panel* p) -> decltype(f(a)) {
  const auto v = bq::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &p->err, &p->l1);
  p->err *= 0.5 * (b - a);
  return v;
}

template <class F>
auto refine(const F& f, double a, double b, decltype(f(a)) v, Panel p, double tol, double noise,
            int depth, double* err) -> decltype(f(a)) {
  if (p.err <= std::max(tol, noise * p.l1) || depth <= 0) {
    *err += p.err;
    return v;
  }
  const double m = 0.5 * (a + b);
  Panel pl, pr;
  const auto vl = gk(f, a, m, &pl);
  const auto vr = gk(f, m, b, &pr);
  return refine(f, a, m, vl, pl, tol / 2, noise, depth - 1, err) +
         refine(f, m, b, vr, pr, tol / 2, noise, depth - 1, err);
}

// The target is absolute, rel_tol times the L1 norm of the integrand, so that
// panels on which an oscillating integrand cancels are not refined forever.
template <class F>
auto panel_sum(const F& f, const std::vector<double>& x, const QuadOptions& opts, double* err)
    -> decltype(f(0.0)) {
  using V = decltype(f(0.0));
  const std::size_t n = x.size() - 1;
  std::vector<V> vals(n);
  std::vector<Panel> panels(n);
  double l1_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = gk(f, x[i], x[i + 1], &panels[i]);
    l1_total += panels[i].l1;
  }
  const double target = opts.rel_tol * l1_total;
  const double noise = 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + opts.phase_scale);
  const double width = x.back() - x.front();
  V total{};
  *err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tol = target * (x[i + 1] - x[i]) / width;
    total += refine(f, x[i], x[i + 1], vals[i], panels[i], tol, noise, opts.max_depth, err);
  }
  return total;
}

}  // namespace

QuadResult integrate(const ComplexFn& f, double a, double b,
                     const std::vector<double>& breaks, QuadOptions opts) {
  if (a == b) return {0.0, 0.0};
  double err = 0.0;
  const cplx v = panel_sum(f, nodes(a, b, breaks, opts.max_panel), opts, &err);
  return {v, err};
}

double integrate_real(const RealFn& f, double a, double b, const std::vector<double>& breaks,
                      QuadOptions opts, double* error) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double v = panel_sum(f, nodes(a, b, breaks, opts.max_panel), opts, &err);
  if (error) *error = err;
  return v;
}

double integrate_endpoint_singular(const RealFn& f, double a, double b,
                                   const std::vector<double>& breaks, double rel_tol,
                                   double* error) {
  if (a == b) return 0.0;
  static thread_local bq::tanh_sinh<double> rule(12);
  const auto x = nodes(a, b, breaks, 0.0);
  double total = 0.0, err_total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    total += rule.integrate(f, x[i], x[i + 1], rel_tol, &err, &l1, &levels);
    err_total += err;
  }
  if (error) *error = err_total;
  return total;
}

double oscillation_panel_width(double x, double t) {
  return std::min(1.0, 8.0 / (std::abs(x) + 4.0 * std::abs(t) + 1.0));
}

QuadOptions oscillatory_options(double x, double t, double rel_tol) {
  QuadOptions o;
  o.rel_tol = rel_tol;
  o.max_panel = oscillation_panel_width(x, t);
  o.phase_scale = std::abs(x) + 4.0 * std::abs(t);
  return o;
}

}  // namespace xxhydro
