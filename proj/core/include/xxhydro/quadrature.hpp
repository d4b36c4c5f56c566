#pragma once

#include <functional>
#include <vector>

#include "xxhydro/types.hpp"

namespace xxhydro {

using ComplexFn = std::function<cplx(double)>;
using RealFn = std::function<double(double)>;

struct QuadOptions {
  double rel_tol = 1e-12;
  int max_depth = 18;
  // Upper bound on the width of a single Gauss-Kronrod panel; 0 means the
  // intervals between breakpoints are used as they are.
  double max_panel = 0.0;
  // Largest |phase| of an oscillating integrand. Panels stop refining at the
  // rounding floor eps * (1 + phase_scale) of their L1 norm.
  double phase_scale = 0.0;
};

struct QuadResult {
  cplx value;
  double error;
};

// Adaptive Gauss-Kronrod over [a, b] split at the given breakpoints. The
// tolerance is relative to the L1 norm of f, not to the result.
QuadResult integrate(const ComplexFn& f, double a, double b,
                     const std::vector<double>& breaks = {}, QuadOptions opts = {});

double integrate_real(const RealFn& f, double a, double b,
                      const std::vector<double>& breaks = {}, QuadOptions opts = {},
                      double* error = nullptr);

// Double-exponential rule on each subinterval; tolerates integrable
// singularities at the breakpoints.
double integrate_endpoint_singular(const RealFn& f, double a, double b,
                                   const std::vector<double>& breaks = {},
                                   double rel_tol = 1e-12, double* error = nullptr);

// Panel width for integrands carrying e^{i(E(k)t - kx)}: a few oscillations
// per panel.
double oscillation_panel_width(double x, double t);
QuadOptions oscillatory_options(double x, double t, double rel_tol);

// Sorted, deduplicated breakpoints restricted to the open interval (a, b).
std::vector<double> clean_breaks(std::vector<double> breaks, double a, double b);

}  // namespace xxhydro
