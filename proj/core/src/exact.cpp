#include "xxhydro/exact.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>

#include "xxhydro/bft.hpp"
#include "xxhydro/quadrature.hpp"

namespace xxhydro {

namespace {

void check_site(const ChainSpec& chain, int x, const char* who) {
  if (x < 0 || x >= chain.N) {
    std::ostringstream msg;
    msg << who << ": site " << x << " outside [0, " << chain.N << ")";
    throw DomainError(msg.str());
  }
}

void check_interval(const ChainSpec& chain, int origin, int x, const char* who) {
  if (x < 0 || origin < 0 || origin + x > chain.N) {
    std::ostringstream msg;
    msg << who << ": interval [" << origin << ", " << origin + x << ") outside the chain";
    throw DomainError(msg.str());
  }
}

unsigned underflow_flag(const LogValue& v) {
  return (!v.is_zero() && v.log_abs < std::log(DBL_MIN)) ? kWarnUnderflow : 0u;
}

// e^{i s h} for Hermitian h.
Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& h, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (I * s * es.eigenvalues().cast<cplx>()).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::VectorXcd phases(const Eigen::VectorXd& energies, double s) {
  return (I * s * energies.cast<cplx>()).array().exp().matrix();
}

// Bond entering site b from the left: (b - 1, b), wrapping on rings.
bool entering_bond(const ChainSpec& chain, int b, int& a) {
  if (b > 0) {
    a = b - 1;
    return true;
  }
  if (chain.boundary == Boundary::periodic && chain.N > 2) {
    a = chain.N - 1;
    return true;
  }
  return false;
}

}  // namespace

bool within_light_cone_window(int N, int d, double t) {
  return std::abs(d) + 4.0 * std::abs(t) <= N;
}

Eigen::MatrixXcd hopping_matrix(const ChainSpec& chain) {
  chain.validate();
  if (chain.boundary == Boundary::periodic) return build_eigenbasis(chain).hopping;
  const int N = chain.N;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(N, N);
  for (int x = 0; x < N; ++x) h(x, x) = 2.0 * chain.h;
  for (int x = 0; x + 1 < N; ++x) h(x, x + 1) = h(x + 1, x) = -2.0;
  return h;
}

EigenBasis build_eigenbasis(const ChainSpec& chain) {
  chain.validate();
  const int N = chain.N;
  EigenBasis b;
  b.chain = chain;
  b.energies.resize(N);
  b.wavenumbers.resize(N);
  if (chain.boundary == Boundary::open) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
    for (int x = 0; x < N; ++x) h(x, x) = 2.0 * chain.h;
    for (int x = 0; x + 1 < N; ++x) h(x, x + 1) = h(x + 1, x) = -2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("build_eigenbasis: eigensolver failed", 0);
    b.energies = es.eigenvalues();
    b.modes = es.eigenvectors().cast<cplx>();
    b.hopping = h.cast<cplx>();
    for (int m = 0; m < N; ++m)
      b.wavenumbers(m) = std::acos(std::clamp((2.0 * chain.h - b.energies(m)) / 4.0, -1.0, 1.0));
    return b;
  }
  const double shift = chain.sector == Sector::even ? 0.5 : 0.0;
  b.modes.resize(N, N);
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));
  for (int m = 0; m < N; ++m) {
    double k = 2.0 * pi * (m + shift) / N;
    if (k > pi) k -= 2.0 * pi;
    b.wavenumbers(m) = k;
    b.energies(m) = dispersion(k, chain.h);
    for (int x = 0; x < N; ++x) b.modes(x, m) = norm * std::exp(I * (k * x));
  }
  b.hopping = b.modes * b.energies.cast<cplx>().asDiagonal() * b.modes.adjoint();
  return b;
}

Eigen::VectorXd mode_occupations(const EigenBasis& basis, const GGEState& state) {
  Eigen::VectorXd n(basis.wavenumbers.size());
  for (Eigen::Index m = 0; m < n.size(); ++m) n(m) = state.occupation(basis.wavenumbers(m));
  return n;
}

Eigen::MatrixXcd occupation_matrix(const EigenBasis& basis, const GGEState& state) {
  const Eigen::VectorXd n = mode_occupations(basis, state);
  return basis.modes * n.cast<cplx>().asDiagonal() * basis.modes.adjoint();
}

ContractionSet contractions(const EigenBasis& basis, const GGEState& state, double t) {
  const Eigen::VectorXd n = mode_occupations(basis, state);
  const Eigen::VectorXcd ph = phases(basis.energies, t);
  const Eigen::VectorXcd fp = (n.cast<cplx>().array() * ph.array()).matrix();
  const Eigen::VectorXcd fh =
      ((1.0 - n.array()).cast<cplx>() * ph.array().conjugate()).matrix();
  const Eigen::MatrixXcd& g = basis.modes;
  const Eigen::MatrixXcd F = g.conjugate() * fp.asDiagonal() * g.transpose();
  const Eigen::MatrixXcd H = g * fh.asDiagonal() * g.adjoint();
  return {F + H, H - F, t};
}

cplx propagator_particle(const EigenBasis& basis, const GGEState& state, int x, int y,
                         double t) {
  check_site(basis.chain, x, "propagator_particle");
  check_site(basis.chain, y, "propagator_particle");
  const Eigen::VectorXd n = mode_occupations(basis, state);
  cplx s = 0.0;
  for (Eigen::Index m = 0; m < n.size(); ++m)
    s += std::conj(basis.modes(x, m)) * basis.modes(y, m) * n(m) *
         std::exp(I * (basis.energies(m) * t));
  return s;
}

cplx propagator_hole(const EigenBasis& basis, const GGEState& state, int x, int y, double t) {
  check_site(basis.chain, x, "propagator_hole");
  check_site(basis.chain, y, "propagator_hole");
  const Eigen::VectorXd n = mode_occupations(basis, state);
  cplx s = 0.0;
  for (Eigen::Index m = 0; m < n.size(); ++m)
    s += basis.modes(x, m) * std::conj(basis.modes(y, m)) * (1.0 - n(m)) *
         std::exp(-I * (basis.energies(m) * t));
  return s;
}

namespace {

struct Op {
  bool is_b;
  int site;
  bool at_t;
};

cplx contraction(const Op& p, const Op& q, const ContractionSet& dyn, const ContractionSet& eq) {
  const ContractionSet& c = (p.at_t && !q.at_t) ? dyn : eq;
  const cplx aa = c.aa(p.site, q.site), ab = c.ab(p.site, q.site);
  if (!p.is_b) return q.is_b ? ab : aa;
  return q.is_b ? -aa : -ab;
}

struct PfaffianEstimate {
  LogValue value;
  // |difference| between two elimination orders, in units of |value|
  double spread = 0.0;
};

// The second pass eliminates a copy in reversed order with entries perturbed
// at the rounding level of the contractions; the spread between the passes
// estimates how many digits of the result survive.
PfaffianEstimate pfaffian_of(const std::vector<Op>& ops, const ContractionSet& dyn,
                             const ContractionSet& eq) {
  const int n = static_cast<int>(ops.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      M(i, j) = contraction(ops[i], ops[j], dyn, eq);
      M(j, i) = -M(i, j);
    }
  Eigen::MatrixXcd R = M.reverse();
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * R.cwiseAbs().maxCoeff();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull + static_cast<unsigned>(n));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      R(i, j) += noise * cplx(u(rng), u(rng));
      R(j, i) = -R(i, j);
    }
  PfaffianEstimate out;
  out.value = pfaffian_log_inplace(M);
  LogValue rev = pfaffian_log_inplace(R);
  // reversal is a product of n(n-1)/2 transpositions
  if ((n * (n - 1) / 2) % 2) rev.phase += pi;
  if (out.value.is_zero() || rev.is_zero()) {
    out.spread = out.value.is_zero() && rev.is_zero() ? 0.0 : 1.0;
    return out;
  }
  out.spread = std::abs(1.0 - std::exp(cplx(rev.log_abs - out.value.log_abs,
                                            rev.phase - out.value.phase)));
  return out;
}

// a * e^{A} + b * e^{B} without leaving log space.
LogValue combine(cplx ca, const LogValue& a, cplx cb, const LogValue& b) {
  if (a.is_zero() && b.is_zero()) return {};
  const double m = std::max(a.log_abs, b.log_abs);
  const cplx s = ca * (a.is_zero() ? cplx(0.0) : std::polar(std::exp(a.log_abs - m), a.phase)) +
                 cb * (b.is_zero() ? cplx(0.0) : std::polar(std::exp(b.log_abs - m), b.phase));
  LogValue r = LogValue::from(s);
  if (!r.is_zero()) r.log_abs += m;
  return r;
}

}  // namespace

ExactValue transverse_pm(const ChainSpec& chain, const GGEState& state, int x, int y, double t) {
  return transverse_pm(build_eigenbasis(chain), state, x, y, t);
}

ExactValue transverse_pm(const EigenBasis& basis, const GGEState& state, int x, int y,
                         double t) {
  const ChainSpec& chain = basis.chain;
  check_site(chain, x, "transverse_pm");
  check_site(chain, y, "transverse_pm");
  if (!std::isfinite(t)) throw DomainError("transverse_pm: time must be finite");
  ExactValue out;
  if (chain.boundary == Boundary::periodic) out.warnings |= kWarnPeriodicString;
  if (!within_light_cone_window(chain.N, x - y, t)) out.warnings |= kWarnBoundary;

  if (t == 0.0 && x < y) {
    ExactValue r = transverse_pm(basis, state, y, x, 0.0);
    r.value.phase = -r.value.phase;
    return r;
  }

  const ContractionSet eq = contractions(basis, state, 0.0);
  const ContractionSet dyn = t == 0.0 ? eq : contractions(basis, state, t);
  std::vector<Op> ops;
  if (t == 0.0) {
    for (int z = y; z < x; ++z) {
      ops.push_back({false, z, true});
      ops.push_back({true, z, true});
    }
    ops.push_back({false, x, true});
  } else {
    ops.reserve(2 * (x + y) + 2);
    for (int z = 0; z < x; ++z) {
      ops.push_back({false, z, true});
      ops.push_back({true, z, true});
    }
    ops.push_back({false, x, true});
    for (int z = 0; z < y; ++z) {
      ops.push_back({false, z, false});
      ops.push_back({true, z, false});
    }
  }
  ops.push_back({false, y, false});
  const PfaffianEstimate pf1 = pfaffian_of(ops, dyn, eq);
  ops.back().is_b = true;
  const PfaffianEstimate pf2 = pfaffian_of(ops, dyn, eq);
  out.value = combine(0.5, pf1.value, -0.5, pf2.value);
  out.warnings |= underflow_flag(out.value);
  if (!out.value.is_zero()) {
    // rounding probe relative to the combined value, cancellation included
    const double scale1 = pf1.value.is_zero() ? 0.0 : std::exp(pf1.value.log_abs - out.value.log_abs);
    const double scale2 = pf2.value.is_zero() ? 0.0 : std::exp(pf2.value.log_abs - out.value.log_abs);
    out.rel_error = 0.5 * (pf1.spread * scale1 + pf2.spread * scale2);
    if (out.rel_error > kRoundingTolerance) out.warnings |= kWarnIllConditioned;
  }
  return out;
}

ExactValue longitudinal_zz(const ChainSpec& chain, const GGEState& state, int x, int y,
                           double t) {
  return longitudinal_zz(build_eigenbasis(chain), state, x, y, t);
}

ExactValue longitudinal_zz(const EigenBasis& basis, const GGEState& state, int x, int y,
                           double t) {
  ExactValue out;
  out.value = LogValue::from(4.0 * propagator_particle(basis, state, x, y, t) *
                             propagator_hole(basis, state, x, y, t));
  if (!within_light_cone_window(basis.chain.N, x - y, t)) out.warnings |= kWarnBoundary;
  return out;
}

namespace {

cplx infinite_integral(const GGEState& state, int x, double t, bool hole) {
  auto f = [&](double k) -> cplx {
    const double w = state.w(k);
    const double occ = hole ? fermi_complement(w) : fermi(w);
    const double phase = hole ? k * x - dispersion(k, state.h()) * t
                              : dispersion(k, state.h()) * t - k * x;
    return occ * std::exp(I * phase);
  };
  const QuadOptions opts = oscillatory_options(x, t, 1e-11);
  const QuadResult r = integrate(f, -pi, pi, state.kinks(), opts);
  return r.value / (2.0 * pi);
}

}  // namespace

cplx propagator_infinite(const GGEState& state, int x, double t) {
  return infinite_integral(state, x, t, false);
}

cplx hole_propagator_infinite(const GGEState& state, int x, double t) {
  return infinite_integral(state, x, t, true);
}

cplx longitudinal_zz_infinite(const GGEState& state, int x, double t) {
  return 4.0 * propagator_infinite(state, x, t) * hole_propagator_infinite(state, x, t);
}

namespace {

Eigen::MatrixXcd string_diagonal(int N, int origin, int x, cplx lambda) {
  Eigen::VectorXcd d = Eigen::VectorXcd::Ones(N);
  for (int z = origin; z < origin + x; ++z) d(z) = std::exp(lambda);
  return d.asDiagonal();
}

ExactValue from_det(const DeterminantResult& d) {
  ExactValue out;
  out.value = d.value;
  out.rcond = d.rcond;
  if (d.ill_conditioned) out.warnings |= kWarnIllConditioned;
  out.warnings |= underflow_flag(d.value);
  return out;
}

}  // namespace

ExactValue generating_function_static(const ChainSpec& chain, const GGEState& state,
                                      cplx lambda, int x, int origin) {
  check_interval(chain, origin, x, "generating_function_static");
  const EigenBasis basis = build_eigenbasis(chain);
  const Eigen::MatrixXcd nhat = occupation_matrix(basis, state);
  return from_det(
      gaussian_trace_det_product(nhat, string_diagonal(chain.N, origin, x, lambda)));
}

ExactValue generating_function_companion(const ChainSpec& chain, const GGEState& state,
                                         cplx lambda, int x, int origin) {
  check_interval(chain, origin, x, "generating_function_companion");
  check_site(chain, origin + x, "generating_function_companion");
  const EigenBasis basis = build_eigenbasis(chain);
  const Eigen::MatrixXcd nhat = occupation_matrix(basis, state);
  const int N = chain.N;
  const Eigen::MatrixXcd U = string_diagonal(N, origin, x, lambda);
  const Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(N, N) - nhat + U * nhat;
  ExactValue out = from_det(determinant_log(D));
  if (out.value.is_zero()) return out;
  // <e^X a^dag_p a_q> = det(D) (nhat D^{-1} U)_{qp}
  const int p = origin + x, q = origin;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
  e(p) = U(p, p);
  const Eigen::VectorXcd col = Eigen::PartialPivLU<Eigen::MatrixXcd>(D).solve(e);
  out.value = out.value * (nhat.row(q) * col).value();
  out.warnings |= underflow_flag(out.value);
  return out;
}

ExactValue string_average_dynamic(const ChainSpec& chain, const GGEState& state, int x,
                                  double t, int origin) {
  check_interval(chain, origin, x, "string_average_dynamic");
  const EigenBasis basis = build_eigenbasis(chain);
  const int N = chain.N;
  Eigen::MatrixXcd h_own = basis.hopping;
  Eigen::MatrixXcd h_flip = h_own;
  int a = 0;
  if (entering_bond(chain, origin, a)) {
    h_flip(a, origin) = -h_flip(a, origin);
    h_flip(origin, a) = -h_flip(origin, a);
  }
  const bool swap = chain.boundary == Boundary::periodic && chain.sector == Sector::even;
  const Eigen::MatrixXcd& h_a = swap ? h_flip : h_own;
  const Eigen::MatrixXcd& h_b = swap ? h_own : h_flip;
  const Eigen::MatrixXcd U =
      hermitian_exp(h_a, t) * string_diagonal(N, origin, x, I * pi) * hermitian_exp(h_b, -t);
  ExactValue out = from_det(gaussian_trace_det_product(occupation_matrix(basis, state), U));
  if (!within_light_cone_window(N, x, t)) out.warnings |= kWarnBoundary;
  return out;
}

void StaircasePath::validate() const {
  if (times.empty()) throw ShapeError("staircase path: no times given");
  if (times.front() != 0.0) throw ShapeError("staircase path: must start at t = 0");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] >= times[i])) throw ShapeError("staircase path: times must not decrease");
  if (!std::isfinite(times.back())) throw ShapeError("staircase path: times must be finite");
}

StaircasePath StaircasePath::corner_up_first(int x, double t) {
  StaircasePath p;
  p.times.assign(x + 1, t);
  p.times[0] = 0.0;
  if (x == 0) p.times[0] = t;
  return p;
}

StaircasePath StaircasePath::corner_right_first(int x, double t) {
  StaircasePath p;
  p.times.assign(x + 1, 0.0);
  p.times[x] = t;
  return p;
}

StaircasePath StaircasePath::uniform(int x, double t) {
  StaircasePath p;
  p.times.resize(x + 1);
  for (int n = 0; n <= x; ++n) p.times[n] = x == 0 ? t : t * n / x;
  return p;
}

ExactValue staircase_string_average(const ChainSpec& chain, const GGEState& state, cplx lambda,
                                    const StaircasePath& path, int trotter_steps, int origin) {
  path.validate();
  const int x = path.x();
  if (x == 0) throw ShapeError("staircase path: needs at least one horizontal step");
  check_interval(chain, origin, x, "staircase_string_average");
  if (trotter_steps < 1) throw DomainError("staircase_string_average: trotter_steps < 1");
  const EigenBasis basis = build_eigenbasis(chain);
  const int N = chain.N;
  const Eigen::MatrixXcd& g = basis.modes;
  const double t = path.t();
  const double delta = t > 0 ? t / trotter_steps : 0.0;

  // Everything is kept in the mode basis, where e^{ihs} is diagonal and each
  // factor is a low-rank update of the identity.
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(N, N);
  auto apply = [&](const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v, double s) {
    // W <- (1 + D_s u v D_s^dag) W
    const Eigen::VectorXcd d = phases(basis.energies, s);
    const Eigen::MatrixXcd left = d.asDiagonal() * u;
    const Eigen::MatrixXcd right = v * d.conjugate().asDiagonal();
    W += left * (right * W);
  };

  for (int n = 0; n < x; ++n) {
    const int site = origin + n;
    const double t0 = path.times[n], t1 = path.times[n + 1];
    int a = 0;
    if (t1 > t0 && entering_bond(chain, site, a)) {
      const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / delta - 1e-9)));
      const double dt = (t1 - t0) / steps;
      Eigen::Matrix2cd gen = Eigen::Matrix2cd::Zero();  // basis (a, site)
      gen(1, 0) = I * (1.0 - std::exp(lambda)) * basis.hopping(site, a);
      gen(0, 1) = I * (1.0 - std::exp(-lambda)) * basis.hopping(a, site);
      const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(dt * gen);
      Eigen::Matrix2cd step;
      const Eigen::Matrix2cd V = es.eigenvectors();
      if (std::abs(V.determinant()) > 1e-8) {
        step = V * es.eigenvalues().array().exp().matrix().asDiagonal() * V.inverse();
      } else {  // nilpotent generator
        step = Eigen::Matrix2cd::Identity() + dt * gen;
      }
      step -= Eigen::Matrix2cd::Identity();
      Eigen::MatrixXcd rows(2, N);
      rows.row(0) = g.row(a);
      rows.row(1) = g.row(site);
      const Eigen::MatrixXcd u = rows.adjoint() * step;
      for (int k = 0; k < steps; ++k) apply(u, rows, t0 + (k + 0.5) * dt);
    }
    Eigen::MatrixXcd row = g.row(site);
    const Eigen::MatrixXcd u = row.adjoint() * (std::exp(-lambda) - 1.0);
    apply(u, row, t1);
  }
  const Eigen::VectorXd occ = mode_occupations(basis, state);
  ExactValue out = from_det(
      gaussian_trace_det_product(occ.cast<cplx>().asDiagonal().toDenseMatrix(), W));
  if (!within_light_cone_window(N, x, t)) out.warnings |= kWarnBoundary;
  return out;
}

FactorisationResult factorisation_check(const ChainSpec& chain, const GGEState& state,
                                        cplx lambda, int x, int origin) {
  FactorisationResult r;
  r.lhs = generating_function_companion(chain, state, lambda, x, origin).complex();
  r.string_average = generating_function_static(chain, state, lambda, x, origin).complex();
  // <a^dag_x a_0> in the state tilted by e^{lambda Q}
  r.shifted_propagator = shifted_propagator(state, -lambda, x, 0.0);
  r.rhs = r.string_average * r.shifted_propagator;
  const double al = std::abs(r.lhs), ar = std::abs(r.rhs);
  r.relative_gap = std::abs(r.lhs - r.rhs) / al;
  r.log_gap = std::abs(std::log(al) - std::log(ar)) / std::abs(std::log(al));
  return r;
}

}  // namespace xxhydro
