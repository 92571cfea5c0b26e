#include <benchmark/benchmark.h>

#include <random>

#include "natalia/media/similarity.hpp"
#include "natalia/sim/sweep_generator.hpp"

using namespace natalia;

static void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto a = sim::textured_frame(0, {side, side}, 1);
  const auto b = sim::textured_frame(1, {side, side}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(media::ssim(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(64)->Arg(224);

static void BM_Ncc(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto a = sim::textured_frame(0, {side, side}, 1);
  const auto b = sim::textured_frame(1, {side, side}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(media::ncc(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Ncc)->Arg(32)->Arg(64)->Arg(224);
