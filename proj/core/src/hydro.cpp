#include "xxhydro/hydro.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

namespace xxhydro {

std::string to_string(EulerRegime r) {
  switch (r) {
    case EulerRegime::interior: return "interior";
    case EulerRegime::edge: return "edge";
    case EulerRegime::exterior: return "exterior";
  }
  return "?";
}

namespace {

EulerRegime classify(double xbar, double tbar) {
  const double xi = xbar / tbar;
  if (std::abs(std::abs(xi) - 4.0) < 1e-9) return EulerRegime::edge;
  return std::abs(xi) < 4.0 ? EulerRegime::interior : EulerRegime::exterior;
}

void check_tbar(double tbar, const char* who) {
  if (!(tbar > 0.0) || !std::isfinite(tbar)) {
    std::ostringstream msg;
    msg << who << ": tbar must be positive, got " << tbar;
    throw DomainError(msg.str());
  }
}

}  // namespace

EulerPrediction euler_S(const GGEState& state, double xbar, double tbar) {
  check_tbar(tbar, "euler_S");
  EulerPrediction p{xbar, tbar, 0.0, classify(xbar, tbar)};
  if (p.regime == EulerRegime::exterior) return p;
  if (p.regime == EulerRegime::edge) {
    p.value = std::numeric_limits<double>::infinity();
    return p;
  }
  const auto [kp, km] = stationary_wavenumbers(xbar / tbar);
  const double np = state.occupation(kp), nm = state.occupation(km);
  p.value = (np * (1 - np) + nm * (1 - nm)) /
            (2 * pi * std::sqrt(tbar * tbar - xbar * xbar / 16.0));
  return p;
}

EulerPrediction density_projection(const GGEState& state, double xbar, double tbar) {
  EulerPrediction p = euler_S(state, xbar, tbar);
  p.value /= 4.0;
  return p;
}

double hydro_projection(const GGEState& state, const ChargeFn& h_i, const ChargeFn& h_j,
                        double xbar, double tbar) {
  check_tbar(tbar, "hydro_projection");
  const double xi = xbar / tbar;
  if (classify(xbar, tbar) != EulerRegime::interior) {
    if (classify(xbar, tbar) == EulerRegime::edge) return std::numeric_limits<double>::infinity();
    return 0.0;
  }
  const auto [kp, km] = stationary_wavenumbers(xi);
  double total = 0.0;
  for (double k : {kp, km}) {
    const double n = state.occupation(k);
    total += n * (1 - n) * h_i(k) * h_j(k) / (2 * pi * std::abs(4.0 * std::cos(k)) * tbar);
  }
  return total;
}

StationaryPhase stationary_phase_parts(const GGEState& state, int x, double t, double s) {
  if (!(t > 0.0)) throw DomainError("stationary_phase_full: t must be positive");
  const double xi = x / t;
  if (!(std::abs(xi) < 4.0)) throw DomainError("stationary_phase_full: requires |x/t| < 4");
  const auto [kp, km] = stationary_wavenumbers(xi);
  const double np = state.occupation(kp), nm = state.occupation(km);
  const double root = std::sqrt(16.0 - xi * xi);
  const double pref = 2.0 / (pi * std::sqrt(16.0 * t * t - static_cast<double>(x) * x));
  const double sign = (x % 2 == 0) ? 1.0 : -1.0;
  const double theta = kp * x + (t + s) * root;
  StationaryPhase out;
  out.smooth = pref * (np * (1 - np) + nm * (1 - nm));
  out.oscillating = pref * sign *
                    (I * np * (1 - nm) * std::exp(-2.0 * I * theta) -
                     I * nm * (1 - np) * std::exp(2.0 * I * theta));
  return out;
}

cplx stationary_phase_full(const GGEState& state, int x, double t, double s) {
  return stationary_phase_parts(state, x, t, s).total();
}

double oscillation_amplitude(const GGEState& state, int x, double t) {
  const double root = std::sqrt(16.0 - (x / t) * (x / t));
  const double period = pi / root;
  double peak = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double s = period * i / 256.0;
    peak = std::max(peak, std::abs(stationary_phase_parts(state, x, t, s).oscillating.real()));
  }
  return peak;
}

double exceptional_ray_phase(double xi) {
  const double a = std::abs(xi);
  return 2.0 * std::asin(a / 4.0) + 2.0 * std::sqrt(16.0 / (a * a) - 1.0);
}

std::vector<double> exceptional_ray_set(int count) {
  if (count < 1) throw DomainError("exceptional_ray_set: count must be >= 1");
  std::vector<double> out;
  for (int m = 1; m <= count; ++m) {
    const double target = (2 * m + 1) * pi;
    auto f = [target](double xi) { return exceptional_ray_phase(xi) - target; };
    // F(xi) ~ 2/xi... decreasing from +inf at 0 to pi at 4.
    double lo = 1.0 / target, hi = 4.0;
    while (f(lo) < 0) lo /= 2;
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    out.push_back(0.5 * (r.first + r.second));
  }
  return out;
}

double distance_to_exceptional_ray(double xi) {
  const double a = std::abs(xi);
  if (a == 0.0 || a >= 4.0) return a == 0.0 ? 0.0 : a - 4.0;
  // The set accumulates at 0; members near a sit where F crosses odd multiples of pi.
  const double F = exceptional_ray_phase(a);
  const int m = std::max(1, static_cast<int>(std::floor((F / pi - 1.0) / 2.0)));
  double best = a;
  for (int mm : {m, m + 1}) {
    const double target = (2 * mm + 1) * pi;
    auto f = [target](double v) { return exceptional_ray_phase(v) - target; };
    double lo = 1.0 / target;
    while (f(lo) < 0) lo /= 2;
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, lo, 4.0, boost::math::tools::eps_tolerance<double>(50), iters);
    best = std::min(best, std::abs(a - 0.5 * (r.first + r.second)));
  }
  return best;
}

double edge_constant() {
  const double c = std::tgamma(4.0 / 3.0) / pi * std::pow(3.0, 5.0 / 6.0) * std::pow(2.0, -4.0 / 3.0);
  return c * c;
}

double edge_asymptotic(const GGEState& state, double t, int sign) {
  if (!(t > 0.0)) throw DomainError("edge_asymptotic: t must be positive");
  if (sign != 1 && sign != -1) throw DomainError("edge_asymptotic: sign must be +1 or -1");
  const double n = state.occupation(sign * pi / 2.0);
  return std::pow(t, -2.0 / 3.0) * edge_constant() * n * (1 - n);
}

double flux_jacobian_action(const GGEState& state, const ChargeFn& h_fn, double k) {
  (void)state;
  return velocity(k) * h_fn(k);
}

std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::time_mean: return "time_mean";
    case CellKind::ray_mean: return "ray_mean";
    case CellKind::ray_mean_with_ray_average: return "ray_mean_with_ray_average";
  }
  return "?";
}

CellKind cell_kind_from_string(const std::string& s) {
  for (CellKind k : {CellKind::time_mean, CellKind::ray_mean, CellKind::ray_mean_with_ray_average})
    if (to_string(k) == s) return k;
  throw DomainError("cell.kind: unknown kind '" + s + "'");
}

void FluidCellSpec::validate() const {
  if (!(ell0 > 0.0)) throw DomainError("cell.ell0 must be positive");
  if (kind == CellKind::ray_mean_with_ray_average && !(epsilon > 0.0))
    throw DomainError("cell.epsilon must be positive for the ray average");
  if (kind != CellKind::time_mean && std::abs(ell0 - std::round(ell0)) > 1e-12)
    throw DomainError("cell.ell0 must be an integer for ray means");
  if (ray_nodes < 2) throw DomainError("cell.ray_nodes must be at least 2");
}

double required_time_spacing(double xi) {
  if (std::abs(xi) >= 4.0) return std::numeric_limits<double>::infinity();
  return pi / (8.0 * std::sqrt(16.0 - xi * xi));
}

namespace {

cplx interpolate(const CorrelatorSeries& s, std::size_t i, double t) {
  const double t0 = s.points[i].t, t1 = s.points[i + 1].t;
  const double u = (t - t0) / (t1 - t0);
  return (1 - u) * s.values[i].value() + u * s.values[i + 1].value();
}

// Trapezoid integral of the piecewise-linear interpolant over [a, b].
cplx trapezoid(const CorrelatorSeries& s, double a, double b) {
  cplx total = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double lo = std::max(a, s.points[i].t), hi = std::min(b, s.points[i + 1].t);
    if (hi <= lo) continue;
    total += 0.5 * (hi - lo) * (interpolate(s, i, lo) + interpolate(s, i, hi));
  }
  return total;
}

unsigned width_flag(double ell0, int x, double t) {
  const double scale = std::max(std::abs(static_cast<double>(x)), std::abs(t));
  return ell0 > scale / 10.0 ? kWarnWideCell : 0u;
}

}  // namespace

CorrelatorSeries apply_fluid_cell(const CorrelatorSeries& series, const FluidCellSpec& cell) {
  cell.validate();
  series.validate();
  CorrelatorSeries out;
  out.observable = series.observable;
  out.state = series.state;
  out.chain = series.chain;
  if (series.size() < 2) throw SamplingError("fluid cell: series has fewer than two points", 0);

  if (cell.kind == CellKind::time_mean) {
    const int x = series.points.front().x;
    double max_dt = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series.points[i].x != x) throw ShapeError("time_mean: series must have a fixed x");
      if (i + 1 < series.size())
        max_dt = std::max(max_dt, series.points[i + 1].t - series.points[i].t);
    }
    const double tmid = series.points[series.size() / 2].t;
    const double need = required_time_spacing(tmid > 0 ? x / tmid : 0.0);
    if (max_dt > need * (1 + 1e-12)) {
      std::ostringstream msg;
      msg << "time_mean: spacing " << max_dt << " exceeds the required " << need;
      throw SamplingError(msg.str(), need);
    }
    const double t_lo = series.points.front().t, t_hi = series.points.back().t;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series.points[i].t;
      if (t - cell.ell0 < t_lo - 1e-12 || t + cell.ell0 > t_hi + 1e-12) continue;
      unsigned flags = width_flag(cell.ell0, x, t);
      for (std::size_t j = 0; j < series.size(); ++j)
        if (std::abs(series.points[j].t - t) <= cell.ell0) flags |= series.warnings[j];
      const cplx mean = trapezoid(series, t - cell.ell0, t + cell.ell0) / (2 * cell.ell0);
      out.push(series.points[i], LogValue::from(mean), flags);
    }
    return out;
  }

  if (cell.kind == CellKind::ray_mean_with_ray_average)
    throw DomainError(
        "ray_mean_with_ray_average needs values off the sampled ray; use fluid_cell_mean");

  const int L = static_cast<int>(std::lround(cell.ell0));
  const int n = static_cast<int>(series.size());
  for (int i = 0; i + 1 < n; ++i)
    if (series.points[i + 1].x != series.points[i].x + 1)
      throw SamplingError("ray_mean: series must step x by one site", 1.0);
  for (int i = L - 1; i + L < n; ++i) {
    cplx sum = 0.0;
    unsigned flags = width_flag(cell.ell0, series.points[i].x, series.points[i].t);
    for (int y = -L + 1; y <= L; ++y) {
      sum += series.values[i + y].value();
      flags |= series.warnings[i + y];
    }
    out.push(series.points[i], LogValue::from(sum / static_cast<double>(2 * L)), flags);
  }
  return out;
}

namespace {

cplx ray_mean_at(const FieldFn& field, int x, double xi, int L) {
  cplx sum = 0.0;
  for (int y = -L + 1; y <= L; ++y) sum += field(x + y, (x + y) / xi);
  return sum / static_cast<double>(2 * L);
}

}  // namespace

cplx fluid_cell_mean(const FieldFn& field, int x, double t, const FluidCellSpec& cell, double dt) {
  cell.validate();
  switch (cell.kind) {
    case CellKind::time_mean: {
      const double need = required_time_spacing(t > 0 ? x / t : 0.0);
      const double h_max = std::min(dt, need);
      const int steps = std::max(2, static_cast<int>(std::ceil(2 * cell.ell0 / h_max)));
      const double h = 2 * cell.ell0 / steps;
      cplx sum = 0.5 * (field(x, t - cell.ell0) + field(x, t + cell.ell0));
      for (int i = 1; i < steps; ++i) sum += field(x, t - cell.ell0 + i * h);
      return sum * h / (2 * cell.ell0);
    }
    case CellKind::ray_mean: {
      if (!(t > 0.0) || x == 0) throw DomainError("ray_mean: base point must lie on a ray xi != 0");
      return ray_mean_at(field, x, x / t, static_cast<int>(std::lround(cell.ell0)));
    }
    case CellKind::ray_mean_with_ray_average: {
      if (!(t > 0.0) || x == 0) throw DomainError("ray_mean: base point must lie on a ray xi != 0");
      const double xi = x / t;
      const int L = static_cast<int>(std::lround(cell.ell0));
      const int m = cell.ray_nodes;
      cplx sum = 0.0;
      for (int i = 0; i < m; ++i) {
        const double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        const double xi_i = xi - cell.epsilon + 2.0 * cell.epsilon * i / (m - 1);
        sum += w * ray_mean_at(field, x, xi_i, L);
      }
      return sum / static_cast<double>(m - 1);
    }
  }
  return 0.0;
}

double oscillation_variance(const std::vector<cplx>& values, const std::vector<cplx>& reference) {
  if (values.size() != reference.size() || values.empty())
    throw ShapeError("oscillation_variance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::norm(values[i] - reference[i]);
  return s / static_cast<double>(values.size());
}

}  // namespace xxhydro
