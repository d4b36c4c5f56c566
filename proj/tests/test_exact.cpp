#include <gtest/gtest.h>

#include <random>

#include "support/fock.hpp"
#include "xxhydro/exact.hpp"

using namespace xxhydro;

namespace {

ChainSpec open_chain(int N, double h) {
  ChainSpec c;
  c.N = N;
  c.h = h;
  return c;
}

ChainSpec ring(int N, double h, Sector s) {
  ChainSpec c = open_chain(N, h);
  c.boundary = Boundary::periodic;
  c.sector = s;
  return c;
}

// Many-body Hamiltonian and thermal density matrix built from the hopping
// matrix written out by hand.
Eigen::MatrixXcd hand_hopping(int N, double h, bool ring_bond, double bond_sign = 1.0) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
  for (int x = 0; x < N; ++x) A(x, x) = 2 * h;
  for (int x = 0; x + 1 < N; ++x) A(x, x + 1) = A(x + 1, x) = -2.0;
  if (ring_bond) A(0, N - 1) = A(N - 1, 0) = -2.0 * bond_sign;
  return A;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(EigenBasis, OpenTwoSite) {
  const EigenBasis b = build_eigenbasis(open_chain(2, 0.0));
  EXPECT_NEAR(b.energies(0), -2.0, 1e-14);
  EXPECT_NEAR(b.energies(1), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(b.modes(0, 0)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::abs(b.modes(0, 0) - b.modes(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(b.modes(0, 1) + b.modes(1, 1)), 0.0, 1e-14);
}

TEST(EigenBasis, UnitaryAndDiagonalising) {
  for (const ChainSpec& c : {open_chain(150, 0.7), ring(40, -1.0, Sector::even),
                             ring(41, 0.3, Sector::odd)}) {
    const EigenBasis b = build_eigenbasis(c);
    const int N = c.N;
    EXPECT_LT((b.modes.adjoint() * b.modes - Eigen::MatrixXcd::Identity(N, N)).norm(), 1e-10);
    EXPECT_LT((b.hopping * b.modes - b.modes * b.energies.cast<cplx>().asDiagonal()).norm(), 1e-8);
    for (int m = 0; m < N; ++m)
      EXPECT_NEAR(dispersion(b.wavenumbers(m), c.h), b.energies(m), 1e-9);
  }
}

TEST(EigenBasis, RingSectorsMatchHandWrittenHopping) {
  const int N = 6;
  const EigenBasis odd = build_eigenbasis(ring(N, 0.5, Sector::odd));
  EXPECT_LT((odd.hopping - hand_hopping(N, 0.5, true, 1.0)).norm(), 1e-12);
  const EigenBasis even = build_eigenbasis(ring(N, 0.5, Sector::even));
  EXPECT_LT((even.hopping - hand_hopping(N, 0.5, true, -1.0)).norm(), 1e-12);
}

TEST(EigenBasis, EvenSectorMomenta) {
  const EigenBasis b = build_eigenbasis(ring(4, 0.0, Sector::even));
  std::vector<double> k(b.wavenumbers.data(), b.wavenumbers.data() + 4);
  std::sort(k.begin(), k.end());
  const std::vector<double> want{-3 * pi / 4, -pi / 4, pi / 4, 3 * pi / 4};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(k[i], want[i], 1e-14);
}

TEST(Contractions, InfiniteTemperatureAndEmptyState) {
  const EigenBasis b = build_eigenbasis(open_chain(12, 0.4));
  const ContractionSet c0 = contractions(b, GGEState::thermal(0.0, 0.4), 0.0);
  EXPECT_LT((c0.aa - Eigen::MatrixXcd::Identity(12, 12)).norm(), 1e-12);
  EXPECT_LT(c0.ab.norm(), 1e-12);
  const EigenBasis e = build_eigenbasis(open_chain(12, 5.0));
  const ContractionSet ce = contractions(e, GGEState::thermal(50.0, 5.0), 0.0);
  EXPECT_LT((ce.ab - Eigen::MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
  const ContractionSet ct = contractions(b, GGEState::thermal(0.0, 0.4), 1.3);
  for (int x = 0; x < 12; ++x) EXPECT_NEAR(ct.aa(x, x).imag(), 0.0, 1e-14);
  EXPECT_LT((ct.bb() + ct.aa).norm(), 1e-15);
}

TEST(Contractions, MatchBruteForce) {
  const int N = 5;
  const double beta = 0.8, h = 0.3, t = 0.9;
  const fock::Mat H = fock::quadratic(hand_hopping(N, h, false));
  const fock::Mat rho = fock::gibbs(H, beta);
  const ContractionSet c =
      contractions(build_eigenbasis(open_chain(N, h)), GGEState::thermal(beta, h), t);
  for (int x = 0; x < N; ++x)
    for (int y = 0; y < N; ++y) {
      const fock::Mat Ax = fock::create(N, x) + fock::annihilate(N, x);
      const fock::Mat Ay = fock::create(N, y) + fock::annihilate(N, y);
      const fock::Mat By = fock::create(N, y) - fock::annihilate(N, y);
      const fock::Mat Axt = fock::heisenberg(H, Ax, t);
      EXPECT_LT(std::abs(c.aa(x, y) - fock::expect(rho, Axt * Ay)), 1e-12);
      EXPECT_LT(std::abs(c.ab(x, y) - fock::expect(rho, Axt * By)), 1e-12);
    }
}

TEST(TransversePM, MatchesBruteForceSpinTrace) {
  const int N = 6;
  const double beta = 0.7, h = 0.4;
  const fock::Mat H = fock::quadratic(hand_hopping(N, h, false));
  const fock::Mat rho = fock::gibbs(H, beta);
  const EigenBasis basis = build_eigenbasis(open_chain(N, h));
  const GGEState s = GGEState::thermal(beta, h);
  const std::vector<std::tuple<int, int, double>> cases{
      {3, 1, 0.0}, {4, 0, 0.0}, {1, 4, 0.0}, {2, 2, 0.0}, {3, 1, 0.6}, {1, 3, 1.1}, {5, 2, 2.0}, {0, 0, 0.4}};
  for (auto [x, y, t] : cases) {
    const fock::Mat sp = fock::heisenberg(H, fock::sigma_plus(N, x), t);
    const cplx want = fock::expect(rho, sp * fock::sigma_minus(N, y));
    const cplx got = transverse_pm(basis, s, x, y, t).complex();
    EXPECT_LT(std::abs(got - want), 1e-12) << x << " " << y << " " << t;
  }
}

TEST(TransversePM, OperatorIdentities) {
  const ChainSpec c = open_chain(20, 0.6);
  const GGEState s = GGEState::thermal(1.3, 0.6);
  const EigenBasis b = build_eigenbasis(c);
  // Hermiticity at t = 0 holds exactly
  const cplx a = transverse_pm(b, s, 12, 5, 0.0).complex();
  const cplx r = transverse_pm(b, s, 5, 12, 0.0).complex();
  EXPECT_EQ(a, std::conj(r));
  // coincident points give the site occupation
  const Eigen::MatrixXcd nhat = occupation_matrix(b, s);
  EXPECT_NEAR(std::abs(transverse_pm(b, s, 7, 7, 0.0).complex() - nhat(7, 7)), 0.0, 1e-13);
  // infinite temperature kills off-diagonal correlations
  EXPECT_LT(std::abs(transverse_pm(c, GGEState::thermal(0.0, 0.6), 9, 4, 0.0).complex()), 1e-14);
  EXPECT_THROW(transverse_pm(c, s, 20, 0, 0.0), DomainError);
}

TEST(TransversePM, WarningsAndLogChannel) {
  const ChainSpec c = open_chain(40, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  EXPECT_EQ(transverse_pm(c, s, 25, 15, 1.0).warnings & kWarnBoundary, 0u);
  EXPECT_NE(transverse_pm(c, s, 25, 15, 8.0).warnings & kWarnBoundary, 0u);
  EXPECT_NE(transverse_pm(ring(10, 1.0, Sector::grand), s, 5, 1, 0.0).warnings & kWarnPeriodicString,
            0u);
  // strongly gapped state: the value underflows but the log channel holds it
  const ChainSpec big = open_chain(700, 6.0);
  const ExactValue v = transverse_pm(big, GGEState::thermal(0.05, 6.0), 650, 10, 0.0);
  EXPECT_TRUE(std::isfinite(v.value.log_abs));
  EXPECT_LT(v.value.log_abs, std::log(1e-308));
  EXPECT_NE(v.warnings & kWarnUnderflow, 0u);
}

TEST(LongitudinalZZ, MatchesBruteForce) {
  const int N = 6;
  const double beta = 0.9, h = -0.5;
  const fock::Mat H = fock::quadratic(hand_hopping(N, h, false));
  const fock::Mat rho = fock::gibbs(H, beta);
  const EigenBasis basis = build_eigenbasis(open_chain(N, h));
  const GGEState s = GGEState::thermal(beta, h);
  auto s3 = [&](int x) -> fock::Mat {
    return 2.0 * fock::number(N, x) - Eigen::MatrixXcd::Identity(fock::dim(N), fock::dim(N));
  };
  for (auto [x, y, t] : std::vector<std::tuple<int, int, double>>{{2, 2, 0.0}, {4, 1, 0.0}, {3, 2, 0.8}, {0, 5, 1.7}}) {
    const fock::Mat zt = fock::heisenberg(H, s3(x), t);
    const cplx want =
        fock::expect(rho, zt * s3(y)) - fock::expect(rho, s3(x)) * fock::expect(rho, s3(y));
    EXPECT_LT(std::abs(longitudinal_zz(basis, s, x, y, t).complex() - want), 1e-12);
  }
  // on-site identity 1 - <sigma^3>^2 and infinite temperature
  const cplx m = fock::expect(rho, s3(3));
  EXPECT_NEAR(std::abs(longitudinal_zz(basis, s, 3, 3, 0.0).complex() - (1.0 - m * m)), 0.0, 1e-12);
  EXPECT_LT(std::abs(longitudinal_zz(open_chain(N, h), GGEState::thermal(0.0, h), 4, 1, 0.0).complex()),
            1e-15);
}

TEST(LongitudinalZZ, InfiniteVolumeRouteMatchesLargeRing) {
  // On a ring the lattice sum is an exponentially accurate rule for the
  // k-integral of a smooth periodic integrand.
  const GGEState s = GGEState::thermal(1.0, 1.0);
  const EigenBasis b = build_eigenbasis(ring(400, 1.0, Sector::odd));
  for (auto [x, t] : std::vector<std::pair<int, double>>{{0, 0.0}, {3, 0.0}, {10, 4.0}, {25, 6.5}}) {
    EXPECT_LT(std::abs(propagator_infinite(s, x, t) - propagator_particle(b, s, x, 0, t)), 1e-10);
    EXPECT_LT(std::abs(hole_propagator_infinite(s, x, t) - propagator_hole(b, s, x, 0, t)), 1e-10);
    EXPECT_LT(std::abs(longitudinal_zz_infinite(s, x, t) -
                       longitudinal_zz(b, s, x, 0, t).complex()),
              1e-10);
  }
}

TEST(GeneratingFunction, MatchesBruteForceWithComplexOccupations) {
  // ring with a parity-breaking Fourier state: nhat is complex Hermitian
  const int N = 6;
  const ChainSpec c = ring(N, 0.2, Sector::odd);
  const GGEState s = GGEState::fourier({0.3, cplx(-0.5, 0.4), cplx(0.1, -0.2)}, 0.2);
  const EigenBasis b = build_eigenbasis(c);
  Eigen::VectorXd w(N);
  for (int m = 0; m < N; ++m) w(m) = s.w(b.wavenumbers(m));
  Eigen::MatrixXcd plane(N, N);
  for (int x = 0; x < N; ++x)
    for (int m = 0; m < N; ++m) plane(x, m) = std::exp(I * (b.wavenumbers(m) * x)) / std::sqrt(6.0);
  const fock::Mat rho = fock::gge(plane, w);
  const cplx lambda(0.4, 2.1);
  for (auto [o, x] : std::vector<std::pair<int, int>>{{0, 3}, {1, 4}, {2, 1}, {0, 0}}) {
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(fock::dim(N), fock::dim(N));
    for (int z = o; z < o + x; ++z) Q += fock::number(N, z);
    const fock::Mat E = fock::hermitian_exp(Q, lambda);  // Q is diagonal, any complex factor works
    EXPECT_LT(rel(generating_function_static(c, s, lambda, x, o).complex(), fock::expect(rho, E)),
              1e-12);
    if (o + x < N) {
      const cplx want = fock::expect(rho, E * fock::create(N, o + x) * fock::annihilate(N, o));
      EXPECT_LT(rel(generating_function_companion(c, s, lambda, x, o).complex(), want), 1e-11)
          << o << " " << x;
    }
  }
}

TEST(GeneratingFunction, NormalisationAndSingleSite) {
  const ChainSpec c = open_chain(30, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  EXPECT_NEAR(std::abs(generating_function_static(c, s, 0.0, 10, 5).complex() - 1.0), 0.0, 1e-13);
  const EigenBasis b = build_eigenbasis(c);
  const Eigen::MatrixXcd nhat = occupation_matrix(b, s);
  EXPECT_NEAR(std::abs(generating_function_companion(c, s, 0.0, 6, 7).complex() - nhat(7, 13)), 0.0,
              1e-13);
  const double lam = 0.7;
  EXPECT_NEAR(std::abs(generating_function_static(c, s, lam, 1, 12).complex() -
                       (1.0 + (std::exp(lam) - 1.0) * nhat(12, 12))),
              0.0, 1e-13);
  EXPECT_THROW(generating_function_static(c, s, lam, 10, 25), DomainError);
}

TEST(StringAverageDynamic, MatchesBruteForceSectorIdentity) {
  const int N = 7;
  const double beta = 0.6, h = 0.8, t = 0.9;
  const GGEState s = GGEState::thermal(beta, h);
  const fock::Mat A = hand_hopping(N, h, false);
  const fock::Mat rho = fock::gibbs(fock::quadratic(A), beta);
  const int o = 2, x = 3;
  auto Ab = A;
  Ab(o - 1, o) = Ab(o, o - 1) = 2.0;  // bond entering the origin flipped
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(fock::dim(N), fock::dim(N));
  for (int z = o; z < o + x; ++z) Q += fock::number(N, z);
  const fock::Mat op = fock::hermitian_exp(fock::quadratic(A), cplx(0, t)) * fock::hermitian_exp(Q, cplx(0, pi)) *
                  fock::hermitian_exp(fock::quadratic(Ab), cplx(0, -t));
  EXPECT_LT(rel(string_average_dynamic(open_chain(N, h), s, x, t, o).complex(), fock::expect(rho, op)),
            1e-12);
}

TEST(StringAverageDynamic, StaticLimitAndEmptyString) {
  const ChainSpec c = open_chain(40, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  EXPECT_LT(rel(string_average_dynamic(c, s, 8, 0.0, 10).complex(),
                generating_function_static(c, s, I * pi, 8, 10).complex()),
            1e-12);
  EXPECT_NEAR(std::abs(string_average_dynamic(c, s, 0, 0.0, 10).complex() - 1.0), 0.0, 1e-13);
}

TEST(Staircase, PurelySpatialPathIsStaticFunction) {
  const ChainSpec c = open_chain(24, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  const cplx lambda(0.3, 1.2);
  for (int steps : {1, 50}) {
    const cplx st = staircase_string_average(c, s, lambda, StaircasePath::uniform(5, 0.0), steps, 8).complex();
    EXPECT_LT(rel(st, generating_function_static(c, s, -lambda, 5, 8).complex()), 1e-12);
  }
}

TEST(Staircase, OpenChainMatchesBruteForceAnyLambda) {
  // On an open chain the region right of a bond has one boundary, so the
  // product equals <e^{lambda R_x(t)} e^{-lambda R_0(0)}> with R_n = Q[o+n, N).
  const int N = 6;
  const double beta = 0.5, h = 0.3, t = 0.8;
  const int o = 1, x = 2;
  const cplx lambda(0.4, 0.9);
  const fock::Mat A = hand_hopping(N, h, false);
  const fock::Mat H = fock::quadratic(A);
  const fock::Mat rho = fock::gibbs(H, beta);
  auto R = [&](int n) {
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(fock::dim(N), fock::dim(N));
    for (int z = o + n; z < N; ++z) Q += fock::number(N, z);
    return Q;
  };
  const fock::Mat U = fock::hermitian_exp(H, cplx(0, t));
  const cplx want = fock::expect(rho, U * fock::hermitian_exp(R(x), lambda) * U.adjoint() *
                                          fock::hermitian_exp(R(0), -lambda));
  const ChainSpec c = open_chain(N, h);
  const GGEState s = GGEState::thermal(beta, h);
  const cplx a = staircase_string_average(c, s, lambda, StaircasePath::corner_up_first(x, t), 2000, o).complex();
  const cplx b = staircase_string_average(c, s, lambda, StaircasePath::corner_right_first(x, t), 2000, o).complex();
  EXPECT_LT(rel(a, want), 2e-5);
  EXPECT_LT(rel(b, want), 2e-5);
}

TEST(Staircase, ConvergesToSectorIdentityAtIPi) {
  const ChainSpec c = open_chain(30, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  const cplx want = string_average_dynamic(c, s, 4, 1.0, 12).complex();
  double prev = 1.0;
  for (int steps : {50, 100, 200}) {
    const cplx got =
        staircase_string_average(c, s, I * pi, StaircasePath::corner_up_first(4, 1.0), steps, 12).complex();
    const double gap = rel(got, want);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Staircase, RejectsBadPaths) {
  const ChainSpec c = open_chain(20, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  StaircasePath p;
  p.times = {0.0, 1.0, 0.5};
  EXPECT_THROW(staircase_string_average(c, s, I * pi, p, 10, 2), ShapeError);
  p.times = {0.2, 1.0};
  EXPECT_THROW(staircase_string_average(c, s, I * pi, p, 10, 2), ShapeError);
  EXPECT_THROW(staircase_string_average(c, s, I * pi, StaircasePath::uniform(3, 1.0), 0, 2),
               DomainError);
}

TEST(Factorisation, TrivialAtZeroLambda) {
  const ChainSpec c = open_chain(80, 1.0);
  const GGEState s = GGEState::thermal(1.0, 1.0);
  const FactorisationResult r = factorisation_check(c, s, 0.0, 10, 35);
  EXPECT_LT(r.relative_gap, 1e-6);
  EXPECT_NEAR(std::abs(r.string_average - 1.0), 0.0, 1e-12);
}
