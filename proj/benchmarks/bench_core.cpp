#include <benchmark/benchmark.h>

#include <random>

#include "vdsr/image.hpp"
#include "vdsr/metrics.hpp"
#include "vdsr/network.hpp"
#include "vdsr/synthetic.hpp"
#include "vdsr/trainer.hpp"

namespace {

vdsr::ImagePlane luminance(std::size_t side, std::uint64_t seed) {
  return vdsr::rgb_to_luminance(vdsr::synthetic_image(side, side, seed));
}

void BM_BicubicIlr(benchmark::State& state) {
  const auto hr = luminance(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(vdsr::make_ilr(hr, 4));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(hr.size()));
}
BENCHMARK(BM_BicubicIlr)->Arg(64)->Arg(227);

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = luminance(side, 2);
  const auto b = vdsr::make_ilr(a, 2);
  for (auto _ : state) benchmark::DoNotOptimize(vdsr::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(227);

// One 41x41 patch through the network, forward only and forward+backward.
void BM_Forward(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  const auto filters = static_cast<std::size_t>(state.range(1));
  const auto model = vdsr::init_model(depth, filters, 3, 1);
  vdsr::FeatureBatch in(1, 1, 41, 41, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(vdsr::forward(model, in));
}
BENCHMARK(BM_Forward)->Args({4, 8})->Args({20, 64})->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  const auto filters = static_cast<std::size_t>(state.range(1));
  const auto model = vdsr::init_model(depth, filters, 3, 1);
  vdsr::FeatureBatch in(1, 1, 41, 41, 0.5);
  vdsr::FeatureBatch go(1, 1, 41, 41, 1e-3);
  for (auto _ : state) {
    const auto trace = vdsr::forward_trace(model, in);
    benchmark::DoNotOptimize(vdsr::backward(model, trace, go));
  }
}
BENCHMARK(BM_ForwardBackward)->Args({4, 8})->Args({20, 64})->Unit(benchmark::kMillisecond);

void BM_TrainEpochToy(benchmark::State& state) {
  const auto images = vdsr::synthetic_images(4, 64, 64, 7);
  const std::vector<int> scales{2};
  const auto pairs = vdsr::build_dataset(images, scales, 41, 6);
  vdsr::TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.mini_batch = 8;
  cfg.threads = 1;
  const auto model = vdsr::init_model(4, 8, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(vdsr::train(model, pairs, cfg));
}
BENCHMARK(BM_TrainEpochToy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
