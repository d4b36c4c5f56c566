#include "xxhydro/bft.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/Polynomials>

#include "xxhydro/quadrature.hpp"

namespace xxhydro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sgn(x - v t) for t >= 0, matching sgn(xi - v) on the ray.
double flow_sign(double x, double t, double k) {
  if (t == 0.0) return sgn(x);
  return sgn(x - velocity(k) * t);
}

std::vector<double> flow_breaks(const GGEState& state, double x, double t) {
  std::vector<double> b = state.kinks();
  if (t > 0 && std::abs(x / t) <= 4.0) {
    const auto [kp, km] = stationary_wavenumbers(x / t);
    b.push_back(kp);
    b.push_back(km);
  }
  return b;
}

// log[(1 + e^{-w - z}) / (1 + e^{-w})] = log(1 + n(w)(e^{-z} - 1)), kept
// accurate for small z.
cplx log_flow_ratio(double w, cplx z) {
  const cplx em1 = -2.0 * std::exp(-0.5 * z) * std::sinh(0.5 * z);
  const cplx u = fermi(w) * em1;
  const cplx v = 1.0 + u;
  if (v == 1.0) return u;
  return u * std::log(v) / (v - 1.0);
}

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << who << ": t must be finite and non-negative, got " << t;
    throw DomainError(msg.str());
  }
}

}  // namespace

double ray_xi(double x, double t) {
  if (t > 0) return x / t;
  return x >= 0 ? kInf : -kInf;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::timelike: return "timelike";
    case Regime::spacelike_gapless: return "spacelike_gapless";
    case Regime::spacelike_gapped: return "spacelike_gapped";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "timelike") return Regime::timelike;
  if (s == "spacelike_gapless") return Regime::spacelike_gapless;
  if (s == "spacelike_gapped") return Regime::spacelike_gapped;
  throw DomainError("unknown regime '" + s + "'");
}

cplx scgf(const GGEState& state, cplx lambda, double x, double t) {
  check_time(t, "scgf");
  if (lambda == cplx(0.0)) return 0.0;
  const double b = std::abs(lambda.imag());
  if (b >= pi) {
    // The argument 1 + e^{-w - s lambda sigma} meets the negative axis at
    // s = (2m+1) pi / |Im lambda| wherever w + s sigma Re(lambda) <= 0.
    const int M = 4096;
    for (int m = 0; (2 * m + 1) * pi <= b * (1 + 1e-15); ++m) {
      const double s = (2 * m + 1) * pi / b;
      for (int i = 0; i < M; ++i) {
        const double k = -pi + (i + 0.5) * 2 * pi / M;
        if (state.w(k) + s * flow_sign(x, t, k) * lambda.real() <= 0.0) {
          std::ostringstream msg;
          msg << "scgf: the flow to lambda = " << lambda
              << " winds the log branch; use string_rate for |<e^{i pi Omega}>|";
          throw BranchError(msg.str());
        }
      }
    }
  }
  auto f = [&](double k) -> cplx {
    const double w = state.w(k);
    const double sig = flow_sign(x, t, k);
    const double weight = std::abs(x - velocity(k) * t);
    return weight * log_flow_ratio(w, lambda * sig);
  };
  QuadOptions opts;
  opts.rel_tol = 1e-13;
  std::vector<double> breaks = flow_breaks(state, x, t);
  breaks.push_back(pi / 2);
  breaks.push_back(-pi / 2);
  const QuadResult r = integrate(f, -pi, pi, breaks, opts);
  return r.value / (2 * pi);
}

FlowObservables flow_observables(const GGEState& state, double lambda, double x, double t) {
  check_time(t, "flow_observables");
  std::vector<double> breaks = flow_breaks(state, x, t);
  QuadOptions opts;
  opts.rel_tol = 1e-13;
  auto n = [&](double k) { return fermi(state.w(k) + lambda * flow_sign(x, t, k)); };
  const double q = integrate_real(n, -pi, pi, breaks, opts) / (2 * pi);
  const double j =
      integrate_real([&](double k) { return velocity(k) * n(k); }, -pi, pi, breaks, opts) /
      (2 * pi);
  return {q, j};
}

double scgf_by_flow(const GGEState& state, double lambda, double x, double t) {
  auto g = [&](double l) {
    const FlowObservables o = flow_observables(state, l, x, t);
    return t * o.j - x * o.q;
  };
  if (lambda == 0.0) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, lambda, 10,
                                                                       1e-13, &err);
}

double string_rate(const GGEState& state, double x, double t) {
  check_time(t, "string_rate");
  if (state.vanishes_identically()) return -kInf;
  auto f = [&](double k) {
    const double w = std::abs(state.w(k));
    if (w == 0.0) return 0.0;  // measure-zero point; the integral is finite
    return std::abs(x - velocity(k) * t) * (std::log(-std::expm1(-w)) - std::log1p(std::exp(-w)));
  };
  std::vector<double> breaks = flow_breaks(state, x, t);
  for (double z : state.real_zeros()) breaks.push_back(z);
  breaks.push_back(pi / 2);
  breaks.push_back(-pi / 2);
  double err = 0.0;
  const double v = integrate_endpoint_singular(f, -pi, pi, breaks, 1e-12, &err);
  if (!(err <= 1e-8 * (1.0 + std::abs(v))))
    throw NumericError("string_rate: quadrature did not converge", err);
  return v / (2 * pi);
}

cplx shifted_propagator(const GGEState& state, cplx lambda, int x, double t) {
  check_time(t, "shifted_propagator");
  auto f = [&](double k) -> cplx {
    const cplx occ = fermi(state.w(k) + lambda * flow_sign(x, t, k));
    return occ * std::exp(I * (dispersion(k, state.h()) * t - k * x));
  };
  std::vector<double> breaks = flow_breaks(state, x, t);
  const QuadOptions opts = oscillatory_options(x, t, 1e-11);

  const bool principal = std::abs(lambda.real()) < 1e-12 &&
                         std::abs(std::abs(std::remainder(lambda.imag(), 2 * pi)) - pi) < 1e-12;
  if (!principal) {
    for (double z : state.real_zeros()) breaks.push_back(z);
    return integrate(f, -pi, pi, breaks, opts).value / (2 * pi);
  }

  // At lambda = i pi the weight is 1/(1 - e^{w}); simple poles at the real
  // zeros of w are integrated symmetrically.
  const std::vector<double> zeros = state.real_zeros();
  cplx total = 0.0;
  std::vector<std::pair<double, double>> holes;
  for (double z : zeros) {
    const double dk = 1e-5;
    const double slope = (state.w(z + dk) - state.w(z - dk)) / (2 * dk);
    if (std::abs(slope) < 1e-6) {
      std::ostringstream msg;
      msg << "shifted_propagator: zero of w at k = " << z
          << " is not simple; the principal value does not exist";
      throw DomainError(msg.str());
    }
    double delta = 0.1;
    auto gap = [](double a, double b) { return std::abs(std::remainder(a - b, 2 * pi)); };
    for (double b : breaks) delta = std::min(delta, 0.45 * gap(z, b));
    for (double o : zeros)
      if (o != z) delta = std::min(delta, 0.45 * gap(z, o));
    auto pair = [&](double u) { return f(z + u) + f(z - u); };
    QuadOptions po = opts;
    total += integrate(pair, 0.0, delta, {}, po).value;
    holes.push_back({z - delta, z + delta});
  }
  // Complement of the windows on the circle, as intervals inside [-pi, pi].
  std::vector<std::pair<double, double>> cut;
  for (auto [lo, hi] : holes) {
    if (lo < -pi) {
      cut.push_back({lo + 2 * pi, pi});
      cut.push_back({-pi, hi});
    } else if (hi > pi) {
      cut.push_back({lo, pi});
      cut.push_back({-pi, hi - 2 * pi});
    } else {
      cut.push_back({lo, hi});
    }
  }
  std::sort(cut.begin(), cut.end());
  double a = -pi;
  for (auto [lo, hi] : cut) {
    if (lo > a) total += integrate(f, a, lo, breaks, opts).value;
    a = std::max(a, hi);
  }
  if (a < pi) total += integrate(f, a, pi, breaks, opts).value;
  return total / (2 * pi);
}

double saddle_exponent(double xi) {
  if (!(std::abs(xi) > 4.0)) {
    std::ostringstream msg;
    msg << "saddle_exponent: requires |xi| > 4, got " << xi;
    throw DomainError(msg.str());
  }
  if (std::isinf(xi)) return kInf;
  const double a = std::abs(xi);
  return std::acosh(a / 4.0) - std::sqrt(1.0 - 16.0 / (a * a));
}

namespace {

cplx wrap_real(cplx z) { return {std::remainder(z.real(), 2 * pi), z.imag()}; }

void keep_zero(std::vector<cplx>& out, cplx z, double max_depth) {
  z = wrap_real(z);
  if (z.real() >= pi) z -= 2 * pi;
  if (std::abs(z.imag()) > max_depth) return;
  out.push_back(z);
}

}  // namespace

std::vector<cplx> singularities(const GGEState& state, double max_depth) {
  std::vector<cplx> out;
  switch (state.kind()) {
    case StateKind::tabulated:
      throw UnsupportedStateError(
          "residue analysis needs the analytic continuation of w; tabulated states have none");
    case StateKind::thermal: {
      const double beta = state.beta(), h = state.h();
      if (beta == 0.0) return out;
      // beta E(z) = 2 pi i m  <=>  cos z = h/2 - i pi m / (2 beta)
      const double cap = std::cosh(std::min(max_depth, 700.0)) + std::abs(h);
      for (int m = 0;; ++m) {
        bool any = false;
        for (int s : {1, -1}) {
          if (m == 0 && s == -1) continue;
          const cplx c(h / 2.0, -pi * s * m / (2.0 * beta));
          if (std::abs(c) > cap) continue;
          any = true;
          const cplx z = std::acos(c);
          keep_zero(out, z, max_depth);
          keep_zero(out, -z, max_depth);
        }
        if (!any || m > 200000) break;
      }
      break;
    }
    case StateKind::fourier: {
      std::vector<cplx> c = state.fourier_coeffs();
      while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
      const int M = static_cast<int>(c.size()) - 1;
      if (M == 0) return out;
      // sum_m c_m u^m - 2 pi i n = 0 with u = e^{iz}, times u^M.
      const int n_max = 64;
      for (int n = -n_max; n <= n_max; ++n) {
        Eigen::VectorXcd poly(2 * M + 1);
        for (int m = -M; m <= M; ++m) poly(m + M) = m >= 0 ? c[m] : std::conj(c[-m]);
        poly(M) -= 2.0 * pi * I * static_cast<double>(n);
        Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(poly);
        for (Eigen::Index r = 0; r < solver.roots().size(); ++r) {
          const cplx u = solver.roots()(r);
          if (std::abs(u) == 0.0) continue;
          cplx z = -I * std::log(u);
          // polish on w(z) = 2 pi i n
          for (int it = 0; it < 4; ++it) {
            cplx wv = 0.0, dw = 0.0;
            for (int m = -M; m <= M; ++m) {
              const cplx cm = m >= 0 ? c[m] : std::conj(c[-m]);
              const cplx e = std::exp(I * (static_cast<double>(m) * z));
              wv += cm * e;
              dw += I * static_cast<double>(m) * cm * e;
            }
            if (std::abs(dw) < 1e-300) break;
            z -= (wv - 2.0 * pi * I * static_cast<double>(n)) / dw;
          }
          keep_zero(out, z, max_depth);
        }
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return std::abs(a.imag()) != std::abs(b.imag()) ? std::abs(a.imag()) < std::abs(b.imag())
                                                    : a.real() < b.real();
  });
  std::vector<cplx> unique;
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool dup = false;
    // duplicates have equal depth up to rounding, so only nearby entries
    for (std::size_t j = unique.size(); j-- > 0;) {
      if (std::abs(unique[j].imag()) < std::abs(out[i].imag()) - 1e-9) break;
      if (std::abs(unique[j] - out[i]) < 1e-10) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(out[i]);
  }
  return unique;
}

namespace {

// Steepest-descent level curves 4 cos k cosh q + xi k = C in the lower half
// plane, xi > 4: C_- from (-pi, 0), C* through the saddle pi/2 - i acosh(xi/4)
// and C_+ from (pi, 0), which is C_- shifted by 2 pi.
struct DescentGeometry {
  double xi;
  double depth;

  double rho(double k, double C) const {
    if (C == c_star()) {
      // xi (pi/2 - k) / (4 cos k) written as u / sin u, finite at the saddle
      const double u = pi / 2 - k;
      return u == 0.0 ? xi / 4.0 : xi / 4.0 * u / std::sin(u);
    }
    return (C - xi * k) / (4.0 * std::cos(k));
  }
  double c_minus() const { return -xi * pi - 4.0; }
  double c_star() const { return xi * pi / 2.0; }
  double c_plus() const { return xi * pi - 4.0; }

  // k on the branch [k_lo, k_hi] where rho(k) = cosh(q); rho monotone there.
  double solve(double C, double k_lo, double k_hi, double target) const {
    auto f = [&](double k) { return rho(k, C) - target; };
    double a = k_lo, b = k_hi;
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0 || (fa > 0) == (fb > 0)) return std::abs(fa) <= std::abs(fb) ? a : b;
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  }

  // Polyline along a branch from depth q0 to q1 (both <= 0), sampled densely
  // in q and in k.
  std::vector<cplx> branch(double C, double k_lo, double k_hi, double q0, double q1) const {
    std::vector<cplx> pts;
    const int nq = 1500;
    for (int i = 0; i <= nq; ++i) {
      const double q = q0 + (q1 - q0) * i / nq;
      const double target = std::cosh(q);
      pts.push_back({solve(C, k_lo, k_hi, target), q});
    }
    const double ka = pts.front().real(), kb = pts.back().real();
    const int nk = 800;
    for (int i = 1; i < nk; ++i) {
      const double k = ka + (kb - ka) * i / nk;
      const double r = rho(k, C);
      if (r < 1.0 || std::acosh(r) > -std::min(q0, q1)) continue;
      if (std::acosh(r) < -std::max(q0, q1)) continue;
      pts.push_back({k, -std::acosh(r)});
    }
    const bool up = ka < kb;
    std::sort(pts.begin(), pts.end(),
              [up](cplx a, cplx b) { return up ? a.real() < b.real() : a.real() > b.real(); });
    return pts;
  }

  std::vector<cplx> polygon() const {
    const double a = std::acosh(xi / 4.0);
    const double eps = 1e-13;
    std::vector<cplx> poly;
    auto append = [&](const std::vector<cplx>& b) { poly.insert(poly.end(), b.begin(), b.end()); };
    append(branch(c_minus(), -pi, -pi / 2 - eps, 0.0, -depth));
    append(branch(c_star(), -pi / 2 + eps, pi / 2, -depth, -a));
    append(branch(c_star(), pi / 2, 3 * pi / 2 - eps, -a, -depth));
    append(branch(c_plus(), pi, 3 * pi / 2 - eps, -depth, 0.0));
    return poly;  // closed by the real segment from pi back to -pi
  }

  // Distance-like residual of z from C*. The C_- and C_+ legs cancel by
  // periodicity, so only C* bounds the domain modulo 2 pi.
  double boundary_residual(cplx z) const {
    const double k = z.real(), q = z.imag();
    double best = kInf;
    auto check = [&](double C, double lo, double hi) {
      if (k < lo || k > hi) return;
      const double r = rho(k, C);
      if (r >= 1.0) best = std::min(best, std::abs(q + std::acosh(r)));
    };
    check(c_star(), -pi / 2, 3 * pi / 2);
    return best;
  }
};

double winding(const std::vector<cplx>& poly, cplx p) {
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = poly[i] - p, b = poly[(i + 1) % n] - p;
    total += std::arg(b / a);
  }
  return total / (2 * pi);
}

}  // namespace

namespace {

class DomainTester {
 public:
  DomainTester(double xi, double depth) : xi_(std::abs(xi)), flip_(xi < 0) {
    if (!(xi_ > 4.0)) throw DomainError("swept domain: requires |xi| > 4");
    if (!std::isinf(xi_)) {
      geo_ = DescentGeometry{xi_, depth + 10.0};
      poly_ = geo_.polygon();
    }
  }

  int operator()(cplx z) const {
    if (flip_) z = -z;
    if (z.imag() >= 0.0) return z.imag() == 0.0 ? 1 : 0;
    if (std::isinf(xi_)) return 1;  // t = 0: the whole lower strip
    z = wrap_real(z);
    if (-z.imag() > geo_.depth - 5.0) return 0;
    for (int shift : {0, 1})
      if (geo_.boundary_residual(z + 2.0 * pi * static_cast<double>(shift)) < 1e-8) return -1;
    for (int shift : {-1, 0, 1})
      if (std::abs(winding(poly_, z + 2.0 * pi * static_cast<double>(shift))) > 0.25) return 1;
    return 0;
  }

 private:
  double xi_;
  bool flip_;
  DescentGeometry geo_{0.0, 0.0};
  std::vector<cplx> poly_;
};

double residue_depth(double xi) {
  if (std::isinf(xi)) return 12.0;
  return std::acosh(std::abs(xi) / 4.0) + 5.0;
}

}  // namespace

namespace {

// Polygons are costly to build; rays are revisited often.
const DomainTester& cached_tester(double xi_abs, double depth) {
  thread_local std::vector<std::pair<std::pair<double, double>, DomainTester>> cache;
  const auto key = std::make_pair(xi_abs, depth);
  auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == key; });
  if (it == cache.end()) {
    if (cache.size() >= 8) cache.erase(cache.begin());
    cache.emplace_back(key, DomainTester(xi_abs, depth));
    it = cache.end() - 1;
  }
  return it->second;
}

}  // namespace

int swept_domain_membership(double xi, cplx z) {
  const double depth = std::max(residue_depth(xi), std::ceil(std::abs(z.imag())) + 1.0);
  return cached_tester(std::abs(xi), depth)(xi < 0 ? -z : z);
}

ResidueResult residue_term(const GGEState& state, double xi, double x, double t) {
  if (!(std::abs(xi) > 4.0)) throw DomainError("residue_term: requires |xi| > 4");
  check_time(t, "residue_term");
  ResidueResult res;
  // Zeros below the saddle depth are dominated by the saddle contribution.
  const double depth = residue_depth(xi);
  const DomainTester& inside = cached_tester(std::abs(xi), depth);
  std::vector<std::pair<double, cplx>> cand;
  for (cplx z : singularities(state, depth)) {
    if (z.imag() != 0.0 && (z.imag() < 0) != (xi > 0)) continue;
    cand.push_back({(I * (t * dispersion(z, state.h()) - x * z)).real(), z});
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  // Highest rate first: stop at the first zero strictly inside.
  for (const auto& [r, z] : cand) {
    const int m = inside(xi < 0 ? -z : z);
    if (m == 0) continue;
    res.rate_included = std::max(res.rate_included, r);
    if (m == -1) {
      res.degenerate = true;
      continue;
    }
    res.inside.push_back(z);
    res.rate_excluded = r;
    res.found = true;
    res.zero = z;
    res.log_contribution = I * (t * dispersion(z, state.h()) - x * z);
    break;
  }
  if (!res.found) res.log_contribution = cplx(-kInf, 0.0);
  return res;
}

DecayRate transverse_rate(const GGEState& state, double x, double t) {
  check_time(t, "transverse_rate");
  DecayRate out;
  if (x == 0.0 && t == 0.0) return out;
  const double xi = ray_xi(x, t);
  out.string_part = string_rate(state, x, t);
  if (std::abs(xi) <= 4.0) {
    out.regime = Regime::timelike;
    out.F = out.string_part;
    out.F_alt = out.F;
    return out;
  }
  const double saddle = std::isinf(xi) ? -kInf : -saddle_exponent(xi) * std::abs(x);
  if (!state.real_zeros().empty()) {
    // A real zero of w contributes with |Lambda| = 1.
    out.regime = Regime::spacelike_gapless;
    out.propagator_part = 0.0;
    out.F = out.string_part;
    out.F_alt = out.F;
    return out;
  }
  out.regime = Regime::spacelike_gapped;
  const ResidueResult res = residue_term(state, xi, x, t);
  double prop = std::max(saddle, res.rate_excluded);
  const double prop_alt = std::max(saddle, res.rate_included);
  out.degenerate = res.degenerate;
  if (state.kind() == StateKind::thermal && std::abs(state.h()) > 2.0) {
    const double rule =
        -std::abs(x) * std::min(std::acosh(std::abs(state.h()) / 2.0),
                                std::isinf(xi) ? kInf : saddle_exponent(xi));
    if (std::abs(rule - prop) > 1e-9 * (1.0 + std::abs(rule))) out.rule_disagreement = true;
    prop = rule;
  }
  out.propagator_part = prop;
  out.F = out.string_part + prop;
  out.F_alt = out.degenerate ? out.string_part + prop_alt : out.F;
  return out;
}

DecayRate ray_rate(const GGEState& state, double phi) {
  if (!(phi >= 0.0 && phi <= pi / 2)) throw DomainError("ray_rate: phi must lie in [0, pi/2]");
  if (std::abs(phi - pi / 2) < 1e-15) return transverse_rate(state, 0.0, 0.25);
  return transverse_rate(state, 1.0, std::tan(phi) / 4.0);
}

}  // namespace xxhydro
