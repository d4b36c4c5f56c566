#pragma once

#include <memory>

#include "xxhydro/exact.hpp"

namespace xxhydro {

// Static correlators on open chains in 50-digit arithmetic. Modes are the
// closed-form standing waves and w(k) is evaluated at the same precision, so
// exponentially small values keep their digits where the double routes hit
// the rounding floor (ExactValue::rel_error). Thermal and fourier states
// only; about two orders of magnitude slower than double.

class ExtendedStatic {
 public:
  ExtendedStatic(const ChainSpec& chain, const GGEState& state);
  ~ExtendedStatic();
  ExtendedStatic(ExtendedStatic&&) noexcept;
  ExtendedStatic& operator=(ExtendedStatic&&) noexcept;

  const ChainSpec& chain() const { return chain_; }
  ExactValue transverse_pm(int x, int y) const;
  ExactValue generating_function(cplx lambda, int x, int origin = 0) const;
  ExactValue companion(cplx lambda, int x, int origin = 0) const;

 private:
  struct Impl;
  ChainSpec chain_;
  std::unique_ptr<Impl> impl_;
};

ExactValue transverse_pm_static_extended(const ChainSpec& chain, const GGEState& state, int x,
                                         int y);

// lambda must make e^lambda real (Im lambda a multiple of pi).
ExactValue generating_function_static_extended(const ChainSpec& chain, const GGEState& state,
                                               cplx lambda, int x, int origin = 0);
ExactValue generating_function_companion_extended(const ChainSpec& chain, const GGEState& state,
                                                  cplx lambda, int x, int origin = 0);

}  // namespace xxhydro
