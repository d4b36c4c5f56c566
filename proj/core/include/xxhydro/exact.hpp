#pragma once

#include <Eigen/Dense>
#include <vector>

#include "xxhydro/model.hpp"
#include "xxhydro/pfaffian.hpp"

namespace xxhydro {

// Warning bits attached to exact values.
enum Warning : unsigned {
  kWarnBoundary = 1u,        // outside the window x - y + 4t <= N
  kWarnIllConditioned = 2u,  // condition estimate above 1e12, or Pfaffian rounding probe
                             // above kRoundingTolerance
  kWarnUnderflow = 4u,       // |value| below the double range
  kWarnPeriodicString = 8u,  // Jordan-Wigner string on a ring, grand-canonical
};

inline constexpr double kRoundingTolerance = 1e-4;

struct EigenBasis {
  ChainSpec chain;
  Eigen::MatrixXcd modes;       // modes(x, m) = g_{x m}
  Eigen::VectorXd energies;     // E_m
  Eigen::VectorXd wavenumbers;  // k_m with E_m = E(k_m)
  Eigen::MatrixXcd hopping;     // one-particle Hamiltonian h_{xy}
};

// Tridiagonal for open chains; on rings the bond (N-1, 0) is periodic for
// the odd and grand sectors and antiperiodic for the even sector.
Eigen::MatrixXcd hopping_matrix(const ChainSpec& chain);
EigenBasis build_eigenbasis(const ChainSpec& chain);

Eigen::VectorXd mode_occupations(const EigenBasis& basis, const GGEState& state);
// nhat(i, j) = <a^dag_j a_i>
Eigen::MatrixXcd occupation_matrix(const EigenBasis& basis, const GGEState& state);

struct ContractionSet {
  Eigen::MatrixXcd aa;  // <A_x(t) A_y>
  Eigen::MatrixXcd ab;  // <A_x(t) B_y>
  double time = 0.0;

  Eigen::MatrixXcd bb() const { return -aa; }
  Eigen::MatrixXcd ba() const { return -ab; }
};

ContractionSet contractions(const EigenBasis& basis, const GGEState& state, double t);

struct ExactValue {
  LogValue value;
  unsigned warnings = 0;
  double rcond = 1.0;
  // Rounding-error probe for Pfaffian results; kWarnIllConditioned is set
  // above kRoundingTolerance.
  double rel_error = 0.0;

  cplx complex() const { return value.value(); }
};

// One-particle propagators <a^dag_x(t) a_y> and <a_x(t) a^dag_y>.
cplx propagator_particle(const EigenBasis& basis, const GGEState& state, int x, int y, double t);
cplx propagator_hole(const EigenBasis& basis, const GGEState& state, int x, int y, double t);

// <sigma^+_x(t) sigma^-_y(0)>
ExactValue transverse_pm(const ChainSpec& chain, const GGEState& state, int x, int y, double t);
ExactValue transverse_pm(const EigenBasis& basis, const GGEState& state, int x, int y, double t);

// Connected <sigma^3_x(t) sigma^3_y(0)> = 4 <a^dag_x(t) a_y><a_x(t) a^dag_y>.
ExactValue longitudinal_zz(const ChainSpec& chain, const GGEState& state, int x, int y, double t);
ExactValue longitudinal_zz(const EigenBasis& basis, const GGEState& state, int x, int y, double t);

// Infinite-volume routes by quadrature: <a^dag_x(t) a_0>, <a_x(t) a^dag_0>
// and their product times 4.
cplx propagator_infinite(const GGEState& state, int x, double t);
cplx hole_propagator_infinite(const GGEState& state, int x, double t);
cplx longitudinal_zz_infinite(const GGEState& state, int x, double t);

// <e^{lambda Q|_o^{o+x}}>, Q|_a^b counting sites a..b-1.
ExactValue generating_function_static(const ChainSpec& chain, const GGEState& state,
                                      cplx lambda, int x, int origin = 0);
// <e^{lambda Q|_o^{o+x}} a^dag_{o+x} a_o>
ExactValue generating_function_companion(const ChainSpec& chain, const GGEState& state,
                                         cplx lambda, int x, int origin = 0);

// <e^{i pi Omega}> along a path from (origin, 0) to (origin + x, t), via the
// sector identity e^{i h_a t} e^{i pi P} e^{-i h_b t}; h_b flips the bond
// entering the origin.
ExactValue string_average_dynamic(const ChainSpec& chain, const GGEState& state, int x,
                                  double t, int origin = 0);

// Staircase from (0, 0) to (x, t): times[0] = 0 <= times[1] <= ... <= times[x] = t.
// The path climbs at site n from times[n] to times[n+1], then steps to n+1.
struct StaircasePath {
  std::vector<double> times;

  int x() const { return static_cast<int>(times.size()) - 1; }
  double t() const { return times.empty() ? 0.0 : times.back(); }
  void validate() const;

  static StaircasePath corner_up_first(int x, double t);
  static StaircasePath corner_right_first(int x, double t);
  static StaircasePath uniform(int x, double t);
};

ExactValue staircase_string_average(const ChainSpec& chain, const GGEState& state, cplx lambda,
                                    const StaircasePath& path, int trotter_steps,
                                    int origin = 0);

struct FactorisationResult {
  cplx lhs;
  cplx rhs;
  double relative_gap;  // |lhs - rhs| / |lhs|
  double log_gap;       // |log|lhs| - log|rhs|| / |log|lhs||
  cplx string_average;
  cplx shifted_propagator;
};

FactorisationResult factorisation_check(const ChainSpec& chain, const GGEState& state,
                                        cplx lambda, int x, int origin = 0);

// Validity window for a pair at separation d = |x - y| and time t.
bool within_light_cone_window(int N, int d, double t);

}  // namespace xxhydro
