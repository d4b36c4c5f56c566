#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xxhydro/model.hpp"
#include "xxhydro/series.hpp"

namespace xxhydro {

enum class EulerRegime { interior, edge, exterior };

std::string to_string(EulerRegime r);

struct EulerPrediction {
  double xbar = 0.0;
  double tbar = 0.0;
  double value = 0.0;
  EulerRegime regime = EulerRegime::interior;
};

// Euler-scale <sigma^3 sigma^3>^c profile:
// (1/2pi) sum_{a=+-} n_a(1-n_a) / sqrt(tbar^2 - (xbar/4)^2) inside the cone.
EulerPrediction euler_S(const GGEState& state, double xbar, double tbar);
// Same for the density correlator <q q>^c, a quarter of euler_S.
EulerPrediction density_projection(const GGEState& state, double xbar, double tbar);
// sum over v(k) = xi of n(1-n) h_i h_j / (2pi |v'(k)| tbar)
double hydro_projection(const GGEState& state, const ChargeFn& h_i, const ChargeFn& h_j,
                        double xbar, double tbar);

struct StationaryPhase {
  cplx smooth;
  cplx oscillating;

  cplx total() const { return smooth + oscillating; }
};

// Two-term asymptotic of <sigma^3_x(t+s) sigma^3_0>^c for |x/t| < 4.
StationaryPhase stationary_phase_parts(const GGEState& state, int x, double t, double s);
cplx stationary_phase_full(const GGEState& state, int x, double t, double s);
// Peak of |Re| of the oscillating term over one period.
double oscillation_amplitude(const GGEState& state, int x, double t);

// 2 arcsin(xi/4) + 2 sqrt(16/xi^2 - 1), decreasing on (0, 4).
double exceptional_ray_phase(double xi);
// The largest `count` solutions of exceptional_ray_phase(xi) = (2m+1) pi.
std::vector<double> exceptional_ray_set(int count);
// Distance from |xi| to the nearest member of the set (0 counts as a member).
double distance_to_exceptional_ray(double xi);

// Asymptotic of <q_x(t) q_0>^c along x = sign * 4t.
double edge_asymptotic(const GGEState& state, double t, int sign);
double edge_constant();

double flux_jacobian_action(const GGEState& state, const ChargeFn& h_fn, double k);

enum class CellKind { time_mean, ray_mean, ray_mean_with_ray_average };

std::string to_string(CellKind k);
CellKind cell_kind_from_string(const std::string& s);

struct FluidCellSpec {
  CellKind kind = CellKind::time_mean;
  double ell0 = 8.0;
  double epsilon = 0.0;  // ray-average half-width
  int ray_nodes = 41;    // quadrature nodes for the ray average

  void validate() const;
};

// Warning bit for cells wider than a tenth of the scale they are applied at.
inline constexpr unsigned kWarnWideCell = 16u;

// Averages a sampled series. time_mean needs a time scan at fixed x,
// ray_mean a scan along a ray through the origin with unit x steps. The ray
// average needs values off the sampled ray; use fluid_cell_mean for it.
CorrelatorSeries apply_fluid_cell(const CorrelatorSeries& series, const FluidCellSpec& cell);

using FieldFn = std::function<cplx(int x, double t)>;

// Fluid-cell mean of a field at base point (x, t); time_mean uses the
// trapezoid rule with at most `dt` spacing.
cplx fluid_cell_mean(const FieldFn& field, int x, double t, const FluidCellSpec& cell,
                     double dt = 0.05);

// Mean of |v - ref|^2.
double oscillation_variance(const std::vector<cplx>& values, const std::vector<cplx>& reference);

// Largest spacing a time scan may have to resolve the oscillation at ray xi.
double required_time_spacing(double xi);

}  // namespace xxhydro
