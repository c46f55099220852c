#include <benchmark/benchmark.h>

#include "ssm/approx.hpp"
#include "ssm/builders.hpp"
#include "ssm/kalman.hpp"
#include "ssm/particle.hpp"

using namespace ssm;

namespace {

// Local linear trend with n observations; poisson counts when `counts` is set.
LinearModel trend_model(Eigen::Index n, bool counts) {
  Rng rng = make_stream(99, 0);
  StructuralSpec spec;
  spec.y = Mat::Zero(n, 1);
  spec.sd_level = 0.05;
  spec.sd_slope = 0.0005;
  Vec a1(2);
  a1 << 1.0, 0.0;
  spec.a1 = a1;
  Mat P1 = Mat::Zero(2, 2);
  P1(0, 0) = 0.1;
  P1(1, 1) = 1e-6;
  spec.P1 = P1;
  const BayesianModel bm = counts ? bsm_ng(spec, Family::poisson) : bsm_lg(spec, 0.5);
  spec.y = simulate(bm.base(), rng).y;
  return (counts ? bsm_ng(spec, Family::poisson) : bsm_lg(spec, 0.5)).base();
}

void BM_KalmanFilter(benchmark::State& state) {
  const LinearModel m = trend_model(state.range(0), false);
  for (auto _ : state) benchmark::DoNotOptimize(kalman_filter(m).loglik);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KalmanFilter)->Arg(100)->Arg(1000);

void BM_KalmanSmoother(benchmark::State& state) {
  const LinearModel m = trend_model(state.range(0), false);
  for (auto _ : state) benchmark::DoNotOptimize(kalman_smoother(m).alphahat.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KalmanSmoother)->Arg(100)->Arg(1000);

void BM_GaussianApproximation(benchmark::State& state) {
  const LinearModel m = trend_model(state.range(0), true);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_approximation(m).approx_loglik());
}
BENCHMARK(BM_GaussianApproximation)->Arg(100)->Arg(1000);

void BM_BootstrapFilter(benchmark::State& state) {
  const LinearModel m = trend_model(200, true);
  Rng rng = make_stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_filter(m, state.range(0), rng).loglik);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_BootstrapFilter)->Arg(100)->Arg(1000);

void BM_PsiApf(benchmark::State& state) {
  const LinearModel m = trend_model(200, true);
  const GaussianApprox ga = gaussian_approximation(m);
  Rng rng = make_stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(psi_apf(m, ga, state.range(0), rng).loglik);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_PsiApf)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
