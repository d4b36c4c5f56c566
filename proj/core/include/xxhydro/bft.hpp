#pragma once

#include <string>
#include <vector>

#include "xxhydro/model.hpp"

namespace xxhydro {

// Flowed GGE along the ray x = xi t (xi = +-inf for t = 0):
// w(lambda; xi; k) = w(k) + lambda sgn(xi - v(k)).
struct FlowState {
  GGEState base;
  cplx lambda = 0.0;
  double xi = 0.0;

  double sigma(double k) const { return sgn(xi - velocity(k)); }
  cplx w(double k) const { return base.w(k) + lambda * sigma(k); }
};

// xi for a space-time point with t >= 0.
double ray_xi(double x, double t);

enum class Regime { timelike, spacelike_gapless, spacelike_gapped };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

struct DecayRate {
  double F = 0.0;
  double string_part = 0.0;
  double propagator_part = 0.0;
  Regime regime = Regime::timelike;
  // Set when the residue domain test and the closed thermal rule differ.
  bool rule_disagreement = false;
  // Set when a zero of w sits on the boundary of the swept domain; F_alt is
  // the rate with the opposite inclusion choice.
  bool degenerate = false;
  double F_alt = 0.0;
};

// int dk/2pi |x - v t| log[(1 + e^{-w - lambda sigma}) / (1 + e^{-w})]
cplx scgf(const GGEState& state, cplx lambda, double x, double t);

struct FlowObservables {
  double q;  // int dk/2pi n_lambda
  double j;  // int dk/2pi v n_lambda
};

FlowObservables flow_observables(const GGEState& state, double lambda, double x, double t);
// int_0^lambda (t j - x q) dlambda'
double scgf_by_flow(const GGEState& state, double lambda, double x, double t);

// f_{x,t}[w] = int dk/2pi |x - v t| log|tanh(w/2)|; -inf if w vanishes on
// a set of positive measure.
double string_rate(const GGEState& state, double x, double t);

// int dk/2pi e^{i(E t - k x)} / (1 + e^{w + lambda sigma}); principal value
// at real zeros of w when lambda = i pi.
cplx shifted_propagator(const GGEState& state, cplx lambda, int x, double t);

// arccosh(|xi|/4) - sqrt(1 - 16/xi^2), |xi| > 4.
double saddle_exponent(double xi);

// Zeros of e^{w(z)} - 1 with Re z in [-pi, pi) and |Im z| <= max_depth.
std::vector<cplx> singularities(const GGEState& state, double max_depth = 40.0);

struct ResidueResult {
  cplx log_contribution;  // t phi(z) = i(t E(z) - x z) of the dominant zero
  cplx zero;
  bool found = false;
  bool degenerate = false;
  double rate_included = -std::numeric_limits<double>::infinity();
  double rate_excluded = -std::numeric_limits<double>::infinity();
  // Strictly interior zeros visited in decreasing rate order; the scan
  // stops at the dominant one.
  std::vector<cplx> inside;
};

// Membership of z in the domain swept when deforming [-pi, pi] onto the
// steepest-descent contour for ray xi, |xi| > 4. Returns 1 inside, 0
// outside, -1 within 1e-8 of the boundary.
int swept_domain_membership(double xi, cplx z);

ResidueResult residue_term(const GGEState& state, double xi, double x, double t);

DecayRate transverse_rate(const GGEState& state, double x, double t);

// Predicted slope of log|<sigma^+_x(t) sigma^-_0>| per unit x along the ray
// t = x tan(phi)/4; for phi = pi/2 the slope per unit of s = 4t.
DecayRate ray_rate(const GGEState& state, double phi);

}  // namespace xxhydro
