#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xxhydro {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class UnsupportedStateError : public Error {
 public:
  using Error::Error;
};

class BranchError : public Error {
 public:
  using Error::Error;
};

// Quadrature or linear algebra did not reach the requested accuracy.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Sampled data too coarse for the requested average.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, double required_spacing)
      : Error(what), required_spacing_(required_spacing) {}
  double required_spacing() const { return required_spacing_; }

 private:
  double required_spacing_;
};

// A complex number stored as log|z| and arg z, so that products of many
// small factors do not underflow.
struct LogValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  static LogValue from(cplx z) {
    if (z == cplx(0.0)) return {};
    return {std::log(std::abs(z)), std::arg(z)};
  }
  static LogValue one() { return {0.0, 0.0}; }

  bool is_zero() const { return std::isinf(log_abs) && log_abs < 0; }
  cplx value() const {
    if (is_zero()) return 0.0;
    return std::polar(std::exp(log_abs), phase);
  }
  double log10_abs() const { return log_abs / std::log(10.0); }

  LogValue operator*(const LogValue& o) const {
    if (is_zero() || o.is_zero()) return {};
    return {log_abs + o.log_abs, std::remainder(phase + o.phase, 2 * pi)};
  }
  LogValue operator*(cplx z) const { return *this * from(z); }
};

}  // namespace xxhydro
