#include <benchmark/benchmark.h>

#include <random>

#include "xxhydro/exact.hpp"
#include "xxhydro/extended.hpp"
#include "xxhydro/pfaffian.hpp"

using namespace xxhydro;

namespace {

Eigen::MatrixXcd random_skew(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      A(i, j) = cplx(g(rng), g(rng));
      A(j, i) = -A(i, j);
    }
  return A;
}

}  // namespace

static void BM_PfaffianLog(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd A = random_skew(n, 7);
  for (auto _ : state) {
    Eigen::MatrixXcd work = A;
    benchmark::DoNotOptimize(pfaffian_log_inplace(work));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_PfaffianLog)->Arg(16)->Arg(64)->Arg(200)->Arg(400)->Complexity(benchmark::oNCubed);

static void BM_DeterminantLog(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd A = random_skew(n, 11) + Eigen::MatrixXcd::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(determinant_log(A));
}
BENCHMARK(BM_DeterminantLog)->Arg(64)->Arg(200);

static void BM_TransversePM(benchmark::State& state) {
  ChainSpec c;
  c.N = static_cast<int>(state.range(0));
  c.h = 1.0;
  const EigenBasis basis = build_eigenbasis(c);
  const GGEState s = GGEState::thermal(0.1, 1.0);
  const int d = 10;
  const int y = (c.N - d) / 2;
  for (auto _ : state) benchmark::DoNotOptimize(transverse_pm(basis, s, y + d, y, 2.0));
}
BENCHMARK(BM_TransversePM)->Arg(64)->Arg(120)->Unit(benchmark::kMillisecond);

// 50-digit static correlator at separation d on an open N=64 chain.
static void BM_ExtendedStaticPM(benchmark::State& state) {
  ChainSpec c;
  c.N = 64;
  c.h = 4.0;
  const ExtendedStatic ext(c, GGEState::thermal(1.0, 4.0));
  const int d = static_cast<int>(state.range(0));
  const int y = (c.N - d) / 2;
  for (auto _ : state) benchmark::DoNotOptimize(ext.transverse_pm(y + d, y));
}
BENCHMARK(BM_ExtendedStaticPM)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_GaussianTraceDet(benchmark::State& state) {
  ChainSpec c;
  c.N = static_cast<int>(state.range(0));
  c.h = 1.0;
  const EigenBasis basis = build_eigenbasis(c);
  const Eigen::MatrixXcd nhat = occupation_matrix(basis, GGEState::thermal(1.0, 1.0));
  Eigen::VectorXcd u = Eigen::VectorXcd::Ones(c.N);
  for (int i = c.N / 4; i < 3 * c.N / 4; ++i) u(i) = -1.0;
  const Eigen::MatrixXcd U = u.asDiagonal();
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_trace_det_product(nhat, U));
}
BENCHMARK(BM_GaussianTraceDet)->Arg(64)->Arg(150);

static void BM_EigenBasis(benchmark::State& state) {
  ChainSpec c;
  c.N = static_cast<int>(state.range(0));
  c.h = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(build_eigenbasis(c));
}
BENCHMARK(BM_EigenBasis)->Arg(120)->Arg(240);
BENCHMARK_MAIN();
