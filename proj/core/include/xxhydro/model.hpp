#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "xxhydro/types.hpp"

namespace xxhydro {

double dispersion(double k, double h);
cplx dispersion(cplx z, double h);
double velocity(double k);

// 1/(1+e^w) and its complement, overflow safe.
double fermi(double w);
double fermi_complement(double w);
cplx fermi(cplx w);

double sgn(double v);  // sgn(0) = +1

struct WavenumberPair {
  double k_plus;
  double k_minus;
};

// Solutions of v(k) = xi; |xi| <= 4.
WavenumberPair stationary_wavenumbers(double xi);

enum class StateKind { thermal, fourier, tabulated };

std::string to_string(StateKind kind);

class GGEState {
 public:
  static GGEState thermal(double beta, double h);
  // w(k) = sum_m c_m e^{imk} with coeffs[m] = c_m for m >= 0 and
  // c_{-m} = conj(c_m); coeffs[0] must be real.
  static GGEState fourier(std::vector<cplx> coeffs, double h);
  // Samples (k_j, w_j) with k in [-pi, pi), non-decreasing. A k listed twice
  // declares a jump: the first value is the left limit, the second the right.
  static GGEState tabulated(std::vector<double> k, std::vector<double> w, double h);

  StateKind kind() const { return kind_; }
  double h() const { return h_; }
  double beta() const { return beta_; }
  const std::vector<cplx>& fourier_coeffs() const { return coeffs_; }
  const std::vector<double>& table_k() const { return table_k_; }
  const std::vector<double>& table_w() const { return table_w_; }

  double w(double k) const;
  // Analytic continuation; thermal and fourier kinds only.
  cplx w(cplx z) const;
  double occupation(double k) const { return fermi(w(k)); }

  // Simple real zeros of w in [-pi, pi), sorted.
  std::vector<double> real_zeros() const;
  // Points where w is discontinuous (tabulated jumps).
  std::vector<double> discontinuities() const;
  // Points where w is not smooth (table nodes); used as quadrature breaks.
  std::vector<double> kinks() const;
  bool vanishes_identically() const;
  bool parity_symmetric() const;

 private:
  GGEState() = default;
  StateKind kind_ = StateKind::thermal;
  double h_ = 0.0;
  double beta_ = 0.0;
  std::vector<cplx> coeffs_;
  std::vector<double> table_k_;
  std::vector<double> table_w_;
  struct TableNode {
    double k, left, right;
  };
  std::vector<TableNode> nodes_;
};

double occupation(const GGEState& state, double k);

using ChargeFn = std::function<double(double)>;

// Integral over k of n(1-n) h_i h_j / 2pi.
double gge_covariance(const GGEState& state, const ChargeFn& h_i, const ChargeFn& h_j);

enum class Boundary { open, periodic };
enum class Sector { even, odd, grand };

std::string to_string(Boundary b);
std::string to_string(Sector s);
Boundary boundary_from_string(const std::string& s);
Sector sector_from_string(const std::string& s);

struct ChainSpec {
  int N = 2;
  double h = 0.0;
  Boundary boundary = Boundary::open;
  Sector sector = Sector::grand;

  void validate() const;
};

struct SpaceTimePoint {
  int x = 0;
  double t = 0.0;
};

struct Ray {
  double xi = 0.0;
  double phi = 0.0;

  static Ray from_phi(double phi);
  static Ray from_xi(double xi);
  // Time reached at site x along the ray, x tan(phi) / 4.
  double time_at(double x) const;
};

}  // namespace xxhydro
