#include <benchmark/benchmark.h>

#include "mmt/channel.hpp"
#include "mmt/instance.hpp"
#include "mmt/rate_distortion.hpp"
#include "mmt/width.hpp"

namespace {

mmt::EmbeddedProcess cloud(std::size_t n) {
  return mmt::generate_instance(mmt::Family::Cloud, n, n, 1).process();
}

void BM_WidthMc(benchmark::State& state) {
  const auto emb = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mmt::width_mc(emb, 100'000, 7).value);
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_WidthMc)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GibbsCoupling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto metric = mmt::metric_of(cloud(n));
  const auto prior = mmt::Prior::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(mmt::gibbs_coupling(metric, prior, 5.0).marginal_residual);
}
BENCHMARK(BM_GibbsCoupling)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_SqrtRateIntegral(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto metric = mmt::metric_of(cloud(n));
  const auto prior = mmt::Prior::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(mmt::sqrt_rate_integral(metric, prior));
}
BENCHMARK(BM_SqrtRateIntegral)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ChannelCurves(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto emb = cloud(n);
  const auto grid = mmt::snr_grid(mmt::decay_certificate(mmt::metric_of(emb)));
  const auto prior = mmt::Prior::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(mmt::channel_curves(emb, prior, grid, 10'000, 3).mmse.values[1]);
  state.SetItemsProcessed(state.iterations() * 10'000 * static_cast<long>(grid.size()));
}
BENCHMARK(BM_ChannelCurves)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_BinaryChannelExact(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mmt::binary_channel_exact(1.0, 4.0).mi);
}
BENCHMARK(BM_BinaryChannelExact)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
