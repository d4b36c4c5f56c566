#include "xxcorr/scan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xxcorr {

using nlohmann::json;
using namespace xxhydro;

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

SpaceTimePoint checked_point(double phi, int n) {
  if (!(phi >= 0.0 && phi <= pi / 2 + 1e-12)) throw DomainError("ray: phi must lie in [0, pi/2]");
  if (n < 0) throw DomainError("ray: scan index must be non-negative");
  return ray_point(phi, n);
}

}  // namespace

bool is_vertical(double phi) { return std::abs(phi - pi / 2) < 1e-12; }

SpaceTimePoint ray_point(double phi, int n) {
  if (is_vertical(phi)) return {0, n / 4.0};
  return {n, n * std::tan(phi) / 4.0};
}

double fit_abscissa(double phi, const SpaceTimePoint& p) {
  return is_vertical(phi) ? 4.0 * p.t : static_cast<double>(p.x);
}

int pair_origin(int N, int d) { return (N - d) / 2; }

CorrelatorSeries exact_ray_series(const EigenBasis& basis, const GGEState& state,
                                  Observable observable, double phi, IntRange range) {
  CorrelatorSeries s;
  s.observable = observable;
  s.state = state;
  s.chain = basis.chain;
  const int N = basis.chain.N;
  for (int n = range.lo; n <= range.hi; ++n) {
    const SpaceTimePoint p = checked_point(phi, n);
    if (p.x >= N) break;
    const int y = pair_origin(N, p.x);
    ExactValue v;
    if (observable == Observable::transverse_pm)
      v = transverse_pm(basis, state, y + p.x, y, p.t);
    else if (observable == Observable::longitudinal_zz_connected)
      v = longitudinal_zz(basis, state, y + p.x, y, p.t);
    else
      throw DomainError("exact_ray_series: unsupported observable " + to_string(observable));
    if (!within_light_cone_window(N, p.x, p.t)) v.warnings |= kWarnBoundary;
    s.push(p, v.value, v.warnings);
  }
  return s;
}

CorrelatorSeries euler_ray_series(const GGEState& state, double phi, IntRange range) {
  CorrelatorSeries s;
  s.observable = Observable::euler_prediction;
  s.state = state;
  for (int n = range.lo; n <= range.hi; ++n) {
    const SpaceTimePoint p = checked_point(phi, n);
    if (p.t == 0.0) {
      if (p.x != 0) s.push(p, LogValue{});
      continue;
    }
    const EulerPrediction e = euler_S(state, p.x, p.t);
    double v = e.value;
    if (e.regime == EulerRegime::edge) v = 4.0 * edge_asymptotic(state, p.t, p.x >= 0 ? 1 : -1);
    s.push(p, LogValue::from(cplx(v)));
  }
  return s;
}

CorrelatorSeries synthetic_ray_series(const GGEState& state, double phi, IntRange range,
                                      double intercept) {
  const double F = ray_rate(state, phi).F;
  CorrelatorSeries s;
  s.observable = Observable::transverse_pm;
  s.state = state;
  for (int n = range.lo; n <= range.hi; ++n) {
    const SpaceTimePoint p = checked_point(phi, n);
    s.push(p, LogValue{F * fit_abscissa(phi, p) + intercept, 0.0});
  }
  return s;
}

std::string ray_sweep_csv(const GGEState& state, const std::vector<double>& phis) {
  std::ostringstream out;
  out << "phi,xi,F_total,F_string,F_propagator,regime\n";
  for (double phi : phis) {
    const DecayRate r = ray_rate(state, is_vertical(phi) ? pi / 2 : phi);
    const double xi = is_vertical(phi) ? 0.0 : Ray::from_phi(phi).xi;
    out << format_double(phi) << ',' << format_double(xi) << ',' << format_double(r.F) << ','
        << format_double(r.string_part) << ',' << format_double(r.propagator_part) << ','
        << to_string(r.regime) << '\n';
  }
  return out.str();
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit_line: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw ShapeError("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ShapeError("fit_line: abscissae coincide");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.rms = std::sqrt(ssr / n);
  f.std_error = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

DecayReport compare_ray(const CorrelatorSeries& exact, const GGEState& state, double phi,
                        IntRange fit_window, double threshold) {
  DecayReport r;
  r.phi = phi;
  r.xi = is_vertical(phi) ? 0.0 : Ray::from_phi(phi).xi;
  r.predicted = ray_rate(state, is_vertical(phi) ? pi / 2 : phi);
  if (r.predicted.rule_disagreement)
    r.warnings.push_back("residue domain test disagrees with the closed thermal rule");
  if (r.predicted.degenerate)
    r.warnings.push_back("zero of w on the swept-domain boundary; alternative rate " +
                         format_double(r.predicted.F_alt));

  std::vector<double> xs, ys;
  int boundary = 0, rounding = 0, zero = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double a = fit_abscissa(phi, exact.points[i]);
    if (a < fit_window.lo || a > fit_window.hi) continue;
    const unsigned w = exact.warnings[i];
    if (exact.values[i].is_zero() || (w & kWarnUnderflow)) {
      ++zero;
      continue;
    }
    if (w & kWarnBoundary) {
      ++boundary;
      continue;
    }
    if (w) {
      ++rounding;
      continue;
    }
    xs.push_back(a);
    ys.push_back(exact.values[i].log_abs);
  }
  if (boundary) r.warnings.push_back(std::to_string(boundary) + " points outside the light-cone window dropped");
  if (rounding) r.warnings.push_back(std::to_string(rounding) + " ill-conditioned points dropped");
  if (zero) r.warnings.push_back(std::to_string(zero) + " zero or underflowing points dropped");
  r.n_points = static_cast<int>(xs.size());
  if (r.n_points < kMinFitPoints) {
    r.warnings.push_back("fewer than " + std::to_string(kMinFitPoints) + " usable points");
    r.gap = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.fitted = fit_line(xs, ys);
  r.gap = std::abs(r.fitted.slope - r.predicted.F) / std::abs(r.predicted.F);
  r.ok = r.gap < threshold;
  return r;
}

json to_json(const DecayReport& r) {
  json j;
  j["ray"] = {{"phi", number(r.phi)}, {"xi", number(r.xi)}};
  j["fitted"] = {{"slope", number(r.fitted.slope)},
                 {"stderr", number(r.fitted.std_error)},
                 {"intercept", number(r.fitted.intercept)},
                 {"rms_residual", number(r.fitted.rms)}};
  j["predicted"] = {{"slope", number(r.predicted.F)},
                    {"breakdown",
                     {{"string", number(r.predicted.string_part)},
                      {"propagator", number(r.predicted.propagator_part)},
                      {"regime", to_string(r.predicted.regime)}}}};
  j["gap"] = number(r.gap);
  j["n_points"] = r.n_points;
  j["warnings"] = r.warnings;
  j["pass"] = r.ok;
  return j;
}

std::vector<FactorisationRow> factorisation_table(const ChainSpec& chain, const GGEState& state,
                                                  const FactorisationConfig& config) {
  std::vector<FactorisationRow> rows;
  for (int x : config.x)
    for (double lam : config.lambda_imag) {
      const int origin = config.origin >= 0 ? config.origin : pair_origin(chain.N, x);
      rows.push_back({x, lam, factorisation_check(chain, state, cplx(0.0, lam), x, origin)});
    }
  return rows;
}

std::string factorisation_csv(const std::vector<FactorisationRow>& rows) {
  std::ostringstream out;
  out << "x,lambda_imag,lhs_re,lhs_im,rhs_re,rhs_im,relative_gap,log_gap\n";
  for (const auto& r : rows)
    out << r.x << ',' << format_double(r.lambda_imag) << ',' << format_double(r.result.lhs.real())
        << ',' << format_double(r.result.lhs.imag()) << ',' << format_double(r.result.rhs.real())
        << ',' << format_double(r.result.rhs.imag()) << ',' << format_double(r.result.relative_gap)
        << ',' << format_double(r.result.log_gap) << '\n';
  return out.str();
}

FieldFn longitudinal_field(const GGEState& state, FieldSource source) {
  if (source == FieldSource::wick)
    return [state](int x, double t) { return longitudinal_zz_infinite(state, x, t); };
  return [state](int x, double t) { return stationary_phase_full(state, x, t, 0.0); };
}

FluidcellReport fluidcell_diagnostic(const GGEState& state, const FluidcellConfig& config,
                                     const FluidCellSpec& cell) {
  cell.validate();
  FluidcellReport r;
  r.xi = config.xi;
  r.cell = cell;
  r.exceptional_distance = distance_to_exceptional_ray(config.xi);
  r.exceptional = r.exceptional_distance < 1e-6;
  r.raw.observable = r.averaged.observable = Observable::longitudinal_zz_connected;
  r.raw.state = r.averaged.state = state;

  const FieldFn field = longitudinal_field(state, config.source);
  std::vector<cplx> raw, mean, ref;
  for (int j = 0; j < config.samples; ++j) {
    int x;
    double t;
    if (cell.kind == CellKind::time_mean) {
      x = config.x;
      t = config.x / config.xi + j * required_time_spacing(config.xi);
    } else {
      x = config.x + j;
      t = x / config.xi;
    }
    const cplx v = field(x, t);
    const cplx m = fluid_cell_mean(field, x, t, cell);
    raw.push_back(v);
    mean.push_back(m);
    ref.push_back(euler_S(state, x, t).value);
    r.raw.push({x, t}, LogValue::from(v));
    r.averaged.push({x, t}, LogValue::from(m));
  }
  r.variance_before = oscillation_variance(raw, ref);
  r.variance_after = oscillation_variance(mean, ref);
  r.ratio = r.variance_before / r.variance_after;
  return r;
}

json to_json(const FluidcellReport& r) {
  return {{"xi", number(r.xi)},
          {"cell",
           {{"kind", to_string(r.cell.kind)},
            {"ell0", number(r.cell.ell0)},
            {"epsilon", number(r.cell.epsilon)},
            {"ray_nodes", r.cell.ray_nodes}}},
          {"variance_before", number(r.variance_before)},
          {"variance_after", number(r.variance_after)},
          {"suppression_ratio", number(r.ratio)},
          {"exceptional_distance", number(r.exceptional_distance)},
          {"exceptional", r.exceptional}};
}

}  // namespace xxcorr
