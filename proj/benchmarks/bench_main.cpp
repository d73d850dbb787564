#include <benchmark/benchmark.h>

#include "dbf/arima.hpp"
#include "dbf/datagen.hpp"
#include "dbf/discrepancy.hpp"
#include "dbf/lp.hpp"
#include "dbf/solvers.hpp"
#include "dbf/trs.hpp"

namespace {

dbf::QuadraticForm random_form(int n, std::uint64_t seed) {
  dbf::SplitMix64 rng(seed);
  dbf::Matrix a(n, n);
  dbf::Vector b(n);
  for (int i = 0; i < n; ++i) {
    b[i] = rng.normal();
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return dbf::QuadraticForm(0.5 * (a + a.transpose()), b, rng.normal());
}

void BM_Trs(benchmark::State& state) {
  const dbf::QuadraticForm qf = random_form(static_cast<int>(state.range(0)), 1);
  const dbf::BallConstraint ball(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(dbf::max_quadratic_on_ball(qf, ball).value);
}
BENCHMARK(BM_Trs)->Arg(3)->Arg(10)->Arg(50);

void BM_InstantDiscrepancies(benchmark::State& state) {
  const auto g = dbf::generate({dbf::DatasetKind::kAds1, static_cast<std::size_t>(state.range(0)), 1});
  const dbf::RegressionDataset data = dbf::embed_lags(g.series, 3);
  const dbf::TargetProxy proxy = dbf::target_proxy(data.rows(), 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dbf::instantaneous_discrepancies(data, dbf::KernelSpec::linear(), dbf::BallConstraint(1.0), proxy).d);
  }
}
BENCHMARK(BM_InstantDiscrepancies)->Arg(750)->Arg(3000);

void BM_SimplexLp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  dbf::SplitMix64 rng(2);
  dbf::Vector losses(n);
  for (int i = 0; i < n; ++i) losses[i] = std::abs(rng.normal());
  const dbf::InstantDiscrepancies d{dbf::Vector::Zero(n), 0};
  dbf::SolverConfig config;
  config.lambda2 = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(dbf::q_step_lp(losses, d, config).values());
}
BENCHMARK(BM_SimplexLp)->Arg(16)->Arg(64);

void BM_AlternatingFit(benchmark::State& state) {
  const auto g = dbf::generate({dbf::DatasetKind::kAds2, static_cast<std::size_t>(state.range(0)), 1});
  const dbf::RegressionDataset data = dbf::embed_lags(g.series, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dbf::fit_dbf_alternating(data, dbf::KernelSpec::linear(), dbf::SolverConfig{}).q);
  }
}
BENCHMARK(BM_AlternatingFit)->Arg(750)->Unit(benchmark::kMillisecond);

void BM_ArimaFit(benchmark::State& state) {
  const auto g = dbf::generate({dbf::DatasetKind::kAds4, 1500, 1});
  const dbf::ArimaOrder order{static_cast<int>(state.range(0)), 0, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(dbf::fit_arima(g.series, order).css);
}
BENCHMARK(BM_ArimaFit)->Args({2, 0})->Args({1, 1})->Args({2, 2})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
