#include "xxhydro/extended.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <cfloat>
#include <sstream>
#include <vector>

namespace xxhydro {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

void require_open(const ChainSpec& chain, const char* who) {
  chain.validate();
  if (chain.boundary != Boundary::open)
    throw DomainError(std::string(who) + ": extended precision supports open chains only");
}

void require_site(const ChainSpec& chain, int x, const char* who) {
  if (x < 0 || x >= chain.N) {
    std::ostringstream msg;
    msg << who << ": site " << x << " outside [0, " << chain.N << ")";
    throw DomainError(msg.str());
  }
}

Real w_extended(const GGEState& s, const Real& k) {
  switch (s.kind()) {
    case StateKind::thermal:
      return Real(s.beta()) * 2 * (Real(s.h()) - 2 * cos(k));
    case StateKind::fourier: {
      const auto& c = s.fourier_coeffs();
      Real r = c[0].real();
      for (std::size_t m = 1; m < c.size(); ++m)
        r += 2 * (Real(c[m].real()) * cos(m * k) - Real(c[m].imag()) * sin(m * k));
      return r;
    }
    case StateKind::tabulated: break;
  }
  throw UnsupportedStateError("extended precision: tabulated states are not supported");
}

Real fermi_extended(const Real& w) {
  if (w <= 0) return 1 / (1 + exp(w));
  const Real e = exp(-w);
  return e / (1 + e);
}

// nhat(i, j) = <a^dag_j a_i> from g(x, m) = sqrt(2/(N+1)) sin(pi m (x+1)/(N+1)).
MatR occupation_extended(const ChainSpec& chain, const GGEState& state) {
  const int N = chain.N;
  const Real p = boost::math::constants::pi<Real>() / (N + 1);
  const Real norm = sqrt(Real(2) / (N + 1));
  MatR g(N, N);
  VecR n(N);
  for (int m = 0; m < N; ++m) {
    n(m) = fermi_extended(w_extended(state, p * (m + 1)));
    for (int x = 0; x < N; ++x) g(x, m) = norm * sin(p * (m + 1) * (x + 1));
  }
  return g * n.asDiagonal() * g.transpose();
}

LogValue to_log(const Real& v) {
  if (v == 0) return {};
  return {static_cast<double>(log(abs(v))), v < 0 ? pi : 0.0};
}

unsigned underflow_flag(const LogValue& v) {
  return (!v.is_zero() && v.log_abs < std::log(DBL_MIN)) ? kWarnUnderflow : 0u;
}

// Parlett-Reid elimination with pivoting on a real antisymmetric matrix.
Real pfaffian_extended(MatR A) {
  const int n = static_cast<int>(A.rows());
  if (n % 2) return 0;
  Real pf = 1;
  for (int k = 0; k + 1 < n; k += 2) {
    int kp = k + 1;
    for (int j = k + 2; j < n; ++j)
      if (abs(A(k, j)) > abs(A(k, kp))) kp = j;
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      pf = -pf;
    }
    if (A(k, k + 1) == 0) return 0;
    pf *= A(k, k + 1);
    const int rest = n - k - 2;
    if (rest > 0) {
      const VecR tau = A.row(k).tail(rest).transpose() / A(k, k + 1);
      const VecR col = A.col(k + 1).tail(rest);
      A.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

struct Op {
  bool is_b;
  int site;
};

// Equal-time contractions: <A_i A_j> = delta_ij, <A_i B_j> = delta_ij - 2 nhat_ij.
Real contraction(const Op& p, const Op& q, const MatR& nhat) {
  const Real aa = p.site == q.site ? Real(1) : Real(0);
  const Real ab = aa - 2 * nhat(p.site, q.site);
  if (!p.is_b) return q.is_b ? ab : aa;
  return q.is_b ? Real(-aa) : Real(-ab);
}

Real wick_pfaffian(const std::vector<Op>& ops, const MatR& nhat) {
  const int n = static_cast<int>(ops.size());
  MatR M = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      M(i, j) = contraction(ops[i], ops[j], nhat);
      M(j, i) = -M(i, j);
    }
  return pfaffian_extended(M);
}

Real real_exp(cplx lambda, const char* who) {
  const double r = std::remainder(lambda.imag(), pi);
  if (std::abs(r) > 1e-12) throw DomainError(std::string(who) + ": e^lambda must be real");
  const long turns = std::lround(lambda.imag() / pi);
  const Real u = exp(Real(lambda.real()));
  return turns % 2 ? Real(-u) : u;
}

MatR string_matrix(const MatR& nhat, const Real& u, int origin, int x) {
  const int N = static_cast<int>(nhat.rows());
  MatR D = MatR::Identity(N, N);
  for (int z = origin; z < origin + x; ++z) D.row(z) += (u - 1) * nhat.row(z);
  return D;
}

void check_interval(const ChainSpec& chain, int origin, int x, const char* who) {
  if (x < 0 || origin < 0 || origin + x > chain.N) {
    std::ostringstream msg;
    msg << who << ": interval [" << origin << ", " << origin + x << ") outside the chain";
    throw DomainError(msg.str());
  }
}

}  // namespace

struct ExtendedStatic::Impl {
  MatR nhat;
};

ExtendedStatic::ExtendedStatic(const ChainSpec& chain, const GGEState& state)
    : chain_(chain) {
  require_open(chain, "ExtendedStatic");
  impl_ = std::make_unique<Impl>(Impl{occupation_extended(chain, state)});
}

ExtendedStatic::~ExtendedStatic() = default;
ExtendedStatic::ExtendedStatic(ExtendedStatic&&) noexcept = default;
ExtendedStatic& ExtendedStatic::operator=(ExtendedStatic&&) noexcept = default;

ExactValue ExtendedStatic::transverse_pm(int x, int y) const {
  const char* who = "transverse_pm_static_extended";
  require_site(chain_, x, who);
  require_site(chain_, y, who);
  // the static correlator is real for open chains, so x < y is the same value
  if (x < y) std::swap(x, y);
  std::vector<Op> ops;
  for (int z = y; z < x; ++z) {
    ops.push_back({false, z});
    ops.push_back({true, z});
  }
  ops.push_back({false, x});
  ops.push_back({false, y});
  const Real pf1 = wick_pfaffian(ops, impl_->nhat);
  ops.back().is_b = true;
  const Real pf2 = wick_pfaffian(ops, impl_->nhat);
  ExactValue out;
  out.value = to_log((pf1 - pf2) / 2);
  out.warnings |= underflow_flag(out.value);
  return out;
}

ExactValue ExtendedStatic::generating_function(cplx lambda, int x, int origin) const {
  const char* who = "generating_function_static_extended";
  check_interval(chain_, origin, x, who);
  const MatR D = string_matrix(impl_->nhat, real_exp(lambda, who), origin, x);
  ExactValue out;
  out.value = to_log(Eigen::PartialPivLU<MatR>(D).determinant());
  out.warnings |= underflow_flag(out.value);
  return out;
}

ExactValue ExtendedStatic::companion(cplx lambda, int x, int origin) const {
  const char* who = "generating_function_companion_extended";
  check_interval(chain_, origin, x, who);
  require_site(chain_, origin + x, who);
  const MatR D = string_matrix(impl_->nhat, real_exp(lambda, who), origin, x);
  const Eigen::PartialPivLU<MatR> lu(D);
  // <e^X a^dag_p a_q> = det(D) (nhat D^{-1} U)_{qp}, D = 1 - nhat + U nhat
  const int p = origin + x, q = origin;
  VecR e = VecR::Zero(chain_.N);
  e(p) = 1;
  const Real v = lu.determinant() * impl_->nhat.row(q).dot(lu.solve(e));
  ExactValue out;
  out.value = to_log(v);
  out.warnings |= underflow_flag(out.value);
  return out;
}

ExactValue transverse_pm_static_extended(const ChainSpec& chain, const GGEState& state, int x,
                                         int y) {
  return ExtendedStatic(chain, state).transverse_pm(x, y);
}

ExactValue generating_function_static_extended(const ChainSpec& chain, const GGEState& state,
                                               cplx lambda, int x, int origin) {
  return ExtendedStatic(chain, state).generating_function(lambda, x, origin);
}

ExactValue generating_function_companion_extended(const ChainSpec& chain, const GGEState& state,
                                                  cplx lambda, int x, int origin) {
  return ExtendedStatic(chain, state).companion(lambda, x, origin);
}

}  // namespace xxhydro
