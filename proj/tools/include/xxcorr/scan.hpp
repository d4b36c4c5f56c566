#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "xxcorr/config.hpp"
#include "xxhydro/bft.hpp"
#include "xxhydro/exact.hpp"
#include "xxhydro/hydro.hpp"
#include "xxhydro/series.hpp"

namespace xxcorr {

using xxhydro::CorrelatorSeries;
using xxhydro::GGEState;

bool is_vertical(double phi);
// Separation and time of scan index n along the ray t = x tan(phi)/4. The
// vertical ray phi = pi/2 is the d = 0 column with n = 4t.
xxhydro::SpaceTimePoint ray_point(double phi, int n);
// Abscissa of the decay fit: d, or 4t on the vertical ray.
double fit_abscissa(double phi, const xxhydro::SpaceTimePoint& p);
// Left site of a pair at separation d centred on the chain.
int pair_origin(int N, int d);

CorrelatorSeries exact_ray_series(const xxhydro::EigenBasis& basis, const GGEState& state,
                                  xxhydro::Observable observable, double phi, IntRange range);
// euler_S at the scan points; the coincident point (0, 0) is skipped.
CorrelatorSeries euler_ray_series(const GGEState& state, double phi, IntRange range);
// e^{F n + intercept} with F the predicted slope; a self-test input for the fit.
CorrelatorSeries synthetic_ray_series(const GGEState& state, double phi, IntRange range,
                                      double intercept);

// phi,xi,F_total,F_string,F_propagator,regime
std::string ray_sweep_csv(const GGEState& state, const std::vector<double>& phis);

struct LinearFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root mean square residual
  int n = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DecayReport {
  double phi = 0.0;
  double xi = 0.0;
  LinearFit fitted;
  xxhydro::DecayRate predicted;
  double gap = 0.0;
  int n_points = 0;
  std::vector<std::string> warnings;
  bool ok = false;
};

inline constexpr int kMinFitPoints = 5;

// Least squares on log|value| over the fit window; warned and zero points are
// dropped.
DecayReport compare_ray(const CorrelatorSeries& exact, const GGEState& state, double phi,
                        IntRange fit_window, double threshold);
nlohmann::json to_json(const DecayReport& r);

struct FactorisationRow {
  int x = 0;
  double lambda_imag = 0.0;
  xxhydro::FactorisationResult result;
};

std::vector<FactorisationRow> factorisation_table(const xxhydro::ChainSpec& chain,
                                                  const GGEState& state,
                                                  const FactorisationConfig& config);
std::string factorisation_csv(const std::vector<FactorisationRow>& rows);

struct FluidcellReport {
  double xi = 0.0;
  xxhydro::FluidCellSpec cell;
  double variance_before = 0.0;
  double variance_after = 0.0;
  double ratio = 0.0;  // before / after
  double exceptional_distance = 0.0;
  bool exceptional = false;  // within 1e-6 of the exceptional ray set
  CorrelatorSeries raw;
  CorrelatorSeries averaged;
};

xxhydro::FieldFn longitudinal_field(const GGEState& state, FieldSource source);

// Oscillation variance about euler_S before and after the fluid cell, over
// config.samples base points.
FluidcellReport fluidcell_diagnostic(const GGEState& state, const FluidcellConfig& config,
                                     const xxhydro::FluidCellSpec& cell);
nlohmann::json to_json(const FluidcellReport& r);

}  // namespace xxcorr
