#include "xxhydro/model.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "xxhydro/quadrature.hpp"

namespace xxhydro {

double dispersion(double k, double h) { return 2.0 * (h - 2.0 * std::cos(k)); }
cplx dispersion(cplx z, double h) { return 2.0 * (h - 2.0 * std::cos(z)); }
double velocity(double k) { return 4.0 * std::sin(k); }

double fermi(double w) {
  if (w <= 0) return 1.0 / (1.0 + std::exp(w));
  const double e = std::exp(-w);
  return e / (1.0 + e);
}

double fermi_complement(double w) { return fermi(-w); }

cplx fermi(cplx w) {
  if (w.real() <= 0) return 1.0 / (1.0 + std::exp(w));
  const cplx e = std::exp(-w);
  return e / (1.0 + e);
}

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

WavenumberPair stationary_wavenumbers(double xi) {
  if (!(std::abs(xi) <= 4.0)) {
    std::ostringstream msg;
    msg << "stationary_wavenumbers: |xi| = " << std::abs(xi) << " exceeds 4";
    throw DomainError(msg.str());
  }
  const double kp = std::asin(xi / 4.0);
  return {kp, sgn(kp) * pi - kp};
}

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::thermal: return "thermal";
    case StateKind::fourier: return "fourier";
    case StateKind::tabulated: return "tabulated";
  }
  return "?";
}

GGEState GGEState::thermal(double beta, double h) {
  if (!std::isfinite(beta) || !std::isfinite(h))
    throw DomainError("thermal state: beta and h must be finite");
  GGEState s;
  s.kind_ = StateKind::thermal;
  s.beta_ = beta;
  s.h_ = h;
  return s;
}

GGEState GGEState::fourier(std::vector<cplx> coeffs, double h) {
  if (coeffs.empty()) throw ShapeError("fourier state: at least c_0 is required");
  if (std::abs(coeffs[0].imag()) > 1e-14 * (1.0 + std::abs(coeffs[0].real())))
    throw DomainError("fourier state: c_0 must be real for w to be real");
  coeffs[0] = coeffs[0].real();
  for (const auto& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw DomainError("fourier state: non-finite coefficient");
  GGEState s;
  s.kind_ = StateKind::fourier;
  s.coeffs_ = std::move(coeffs);
  s.h_ = h;
  return s;
}

GGEState GGEState::tabulated(std::vector<double> k, std::vector<double> w, double h) {
  if (k.size() != w.size()) throw ShapeError("tabulated state: k and w differ in length");
  if (k.size() < 2) throw ShapeError("tabulated state: need at least two samples");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i]) || !std::isfinite(w[i]))
      throw DomainError("tabulated state: non-finite sample");
    if (k[i] < -pi || k[i] >= pi) throw DomainError("tabulated state: k outside [-pi, pi)");
    if (i > 0 && k[i] < k[i - 1]) throw ShapeError("tabulated state: k must be non-decreasing");
    if (i > 1 && k[i] == k[i - 1] && k[i] == k[i - 2])
      throw ShapeError("tabulated state: a jump lists at most two values");
  }
  GGEState s;
  s.kind_ = StateKind::tabulated;
  s.table_k_ = std::move(k);
  s.table_w_ = std::move(w);
  s.h_ = h;
  for (std::size_t i = 0; i < s.table_k_.size(); ++i) {
    if (!s.nodes_.empty() && s.nodes_.back().k == s.table_k_[i])
      s.nodes_.back().right = s.table_w_[i];
    else
      s.nodes_.push_back({s.table_k_[i], s.table_w_[i], s.table_w_[i]});
  }
  return s;
}

namespace {

double wrap(double k) {
  double r = std::remainder(k, 2 * pi);
  if (r >= pi) r -= 2 * pi;
  return r;
}

}  // namespace

double GGEState::w(double k) const {
  switch (kind_) {
    case StateKind::thermal: return beta_ * dispersion(k, h_);
    case StateKind::fourier: {
      double r = coeffs_[0].real();
      for (std::size_t m = 1; m < coeffs_.size(); ++m)
        r += 2.0 * (coeffs_[m] * std::polar(1.0, static_cast<double>(m) * k)).real();
      return r;
    }
    case StateKind::tabulated: {
      const auto& nodes = nodes_;
      const double q = wrap(k);
      auto it = std::upper_bound(nodes.begin(), nodes.end(), q,
                                 [](double v, const TableNode& n) { return v < n.k; });
      // q lies in [prev.k, next.k) with periodic wrap.
      const TableNode& prev = it == nodes.begin() ? nodes.back() : *(it - 1);
      const TableNode& next = it == nodes.end() ? nodes.front() : *it;
      double k0 = prev.k, k1 = next.k;
      double qq = q;
      if (it == nodes.begin()) k0 -= 2 * pi;
      if (it == nodes.end()) k1 += 2 * pi;
      if (qq == prev.k) return 0.5 * (prev.left + prev.right);
      if (nodes.size() == 1) return prev.right;
      const double s = (qq - k0) / (k1 - k0);
      return (1 - s) * prev.right + s * next.left;
    }
  }
  return 0.0;
}

cplx GGEState::w(cplx z) const {
  switch (kind_) {
    case StateKind::thermal: return beta_ * dispersion(z, h_);
    case StateKind::fourier: {
      cplx r = coeffs_[0];
      for (std::size_t m = 1; m < coeffs_.size(); ++m) {
        const double md = static_cast<double>(m);
        r += coeffs_[m] * std::exp(I * md * z) + std::conj(coeffs_[m]) * std::exp(-I * md * z);
      }
      return r;
    }
    case StateKind::tabulated:
      throw UnsupportedStateError("tabulated state has no analytic continuation");
  }
  return 0.0;
}

std::vector<double> GGEState::real_zeros() const {
  std::vector<double> zeros;
  switch (kind_) {
    case StateKind::thermal: {
      if (beta_ == 0.0 || std::abs(h_) > 2.0) return zeros;
      const double a = std::acos(h_ / 2.0);
      zeros.push_back(wrap(-a));
      if (a != 0.0 && a != pi) zeros.push_back(a);
      break;
    }
    case StateKind::fourier: {
      if (vanishes_identically()) return zeros;
      const int M = 4096;
      const double dk = 2 * pi / M;
      auto f = [this](double k) { return w(k); };
      for (int i = 0; i < M; ++i) {
        const double a = -pi + i * dk, b = a + dk;
        const double fa = f(a), fb = f(b);
        if (fa == 0.0) {
          zeros.push_back(a);
        } else if (fa * fb < 0) {
          boost::uintmax_t iters = 200;
          auto r = boost::math::tools::toms748_solve(
              f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
          zeros.push_back(0.5 * (r.first + r.second));
        }
      }
      break;
    }
    case StateKind::tabulated: {
      const auto& nodes = nodes_;
      const std::size_t n = nodes.size();
      for (std::size_t i = 0; i < n; ++i) {
        const TableNode& a = nodes[i];
        const TableNode& b = nodes[(i + 1) % n];
        const double kb = i + 1 == n ? b.k + 2 * pi : b.k;
        if (a.left == 0.0 && a.right == 0.0) zeros.push_back(a.k);
        if (a.right * b.left < 0) {
          const double s = a.right / (a.right - b.left);
          zeros.push_back(wrap(a.k + s * (kb - a.k)));
        }
      }
      break;
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

std::vector<double> GGEState::discontinuities() const {
  std::vector<double> out;
  if (kind_ != StateKind::tabulated) return out;
  for (const auto& n : nodes_)
    if (n.left != n.right) out.push_back(n.k);
  return out;
}

std::vector<double> GGEState::kinks() const {
  std::vector<double> out;
  if (kind_ != StateKind::tabulated) return out;
  for (const auto& n : nodes_) out.push_back(n.k);
  return out;
}

bool GGEState::vanishes_identically() const {
  switch (kind_) {
    case StateKind::thermal: return beta_ == 0.0;
    case StateKind::fourier:
      return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx(0.0); });
    case StateKind::tabulated: {
      // Zero on a set of positive measure: two neighbouring nodes at zero.
      const auto& nodes = nodes_;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const TableNode& a = nodes[i];
        const TableNode& b = nodes[(i + 1) % nodes.size()];
        if (a.right == 0.0 && b.left == 0.0) return true;
      }
      return false;
    }
  }
  return false;
}

bool GGEState::parity_symmetric() const {
  switch (kind_) {
    case StateKind::thermal: return true;
    case StateKind::fourier:
      return std::all_of(coeffs_.begin(), coeffs_.end(),
                         [](cplx c) { return std::abs(c.imag()) <= 1e-14 * (1 + std::abs(c)); });
    case StateKind::tabulated:
      for (double k : kinks())
        if (std::abs(w(k) - w(-k)) > 1e-12 * (1 + std::abs(w(k)))) return false;
      return true;
  }
  return false;
}

double occupation(const GGEState& state, double k) { return state.occupation(k); }

double gge_covariance(const GGEState& state, const ChargeFn& h_i, const ChargeFn& h_j) {
  auto f = [&](double k) {
    const double w = state.w(k);
    return fermi(w) * fermi_complement(w) * h_i(k) * h_j(k);
  };
  double err = 0.0;
  const double v = integrate_real(f, -pi, pi, state.kinks(), {}, &err) / (2 * pi);
  if (!(err <= 1e-9 * (1.0 + std::abs(v) * 2 * pi)))
    throw NumericError("gge_covariance: quadrature did not converge", err);
  return v;
}

std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

std::string to_string(Sector s) {
  switch (s) {
    case Sector::even: return "even";
    case Sector::odd: return "odd";
    case Sector::grand: return "grand";
  }
  return "?";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw DomainError("unknown boundary '" + s + "' (expected open or periodic)");
}

Sector sector_from_string(const std::string& s) {
  if (s == "even") return Sector::even;
  if (s == "odd") return Sector::odd;
  if (s == "grand") return Sector::grand;
  throw DomainError("unknown sector '" + s + "' (expected even, odd or grand)");
}

void ChainSpec::validate() const {
  if (N < 2) throw DomainError("chain: N must be at least 2");
  if (N > 4096) throw SizeGuardError("chain: N above 4096 is not supported");
  if (!std::isfinite(h)) throw DomainError("chain: h must be finite");
}

Ray Ray::from_phi(double phi) {
  if (!(phi >= 0.0 && phi <= pi)) throw DomainError("ray: phi must lie in [0, pi]");
  Ray r;
  r.phi = phi;
  if (phi == 0.0)
    r.xi = std::numeric_limits<double>::infinity();
  else if (phi == pi)
    r.xi = -std::numeric_limits<double>::infinity();
  else
    r.xi = 4.0 * std::cos(phi) / std::sin(phi);
  return r;
}

Ray Ray::from_xi(double xi) {
  Ray r;
  r.xi = xi;
  r.phi = std::isinf(xi) ? (xi > 0 ? 0.0 : pi) : std::atan2(4.0, xi);
  return r;
}

double Ray::time_at(double x) const {
  if (std::isinf(xi)) return 0.0;
  if (xi == 0.0) throw DomainError("ray: time along the x = 0 column is not a function of x");
  return x / xi;
}

}  // namespace xxhydro
