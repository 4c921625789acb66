#include <benchmark/benchmark.h>

#include "gsreg/divergences.hpp"
#include "gsreg/families.hpp"
#include "gsreg/linalg.hpp"
#include "gsreg/model.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/priors.hpp"

namespace {

gsreg::FamilyParams scalar_family() {
  gsreg::ParamCorrelationParams p;
  p.kind = gsreg::CorrelationKind::AR;
  p.alpha = 0.0;
  p.sigma2 = 1.0;
  return p;
}

gsreg::SparseVector truth(int p) {
  Eigen::VectorXd vals(2);
  vals << 1.0, -1.2;
  return gsreg::SparseVector({1, 4}, vals, p);
}

void BM_LogLikelihood(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = gsreg::simulate(scalar_family(), truth(8), n, 8, 42);
  const gsreg::NuisanceState eta(scalar_family(), data);
  const auto theta = truth(8);
  for (auto _ : state)
    benchmark::DoNotOptimize(gsreg::log_likelihood(data, theta, eta));
}
BENCHMARK(BM_LogLikelihood)->Arg(100)->Arg(400);

void BM_LaplaceEnumeration(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto data = gsreg::simulate(scalar_family(), truth(p), 100, p, 42);
  const gsreg::NuisanceState eta(scalar_family(), data);
  gsreg::SpikeSlabSpec spec{p, 2.0, 1.0};
  gsreg::QuadratureOptions opts;
  opts.max_points_per_dim = 16;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        gsreg::enumerate_posterior_laplace_slab(data, spec, eta, 2, opts));
}
BENCHMARK(BM_LaplaceEnumeration)->Arg(6)->Arg(8)->Arg(10);

void BM_Rjmcmc(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto data = gsreg::simulate(scalar_family(), truth(p), 200, p, 42);
  gsreg::SpikeSlabSpec spec{p, 2.0, 1.0};
  gsreg::McmcState init;
  init.theta = gsreg::SparseVector({}, Eigen::VectorXd(0), p);
  init.eta = scalar_family();
  gsreg::McmcOptions opts;
  opts.n_iter = 2000;
  for (auto _ : state)
    benchmark::DoNotOptimize(gsreg::rjmcmc_sample(
        data, spec, gsreg::NuisancePriorSpec{}, init, 7, opts, true));
}
BENCHMARK(BM_Rjmcmc)->Arg(20)->Arg(100);

void BM_AvgRenyi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = gsreg::simulate(scalar_family(), truth(8), n, 8, 42);
  const gsreg::NuisanceState eta(scalar_family(), data);
  const gsreg::SparseVector empty({}, Eigen::VectorXd(0), 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        gsreg::avg_renyi(data, truth(8), eta, empty, eta));
}
BENCHMARK(BM_AvgRenyi)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
