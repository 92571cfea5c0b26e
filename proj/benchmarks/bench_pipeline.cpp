#include <benchmark/benchmark.h>

#include "natalia/classifier/mock_backend.hpp"
#include "natalia/dataset/builder.hpp"
#include "natalia/keyframes/keyframes.hpp"
#include "natalia/sim/sweep_generator.hpp"

using namespace natalia;

namespace {

sim::SyntheticSweep make_sweep(std::size_t frames, int side) {
  sim::SweepSpec spec;
  spec.frame_count = frames;
  spec.size = {side, side};
  spec.spans = sim::parse_label_spans("AC@10-14,FL@40-42");
  return sim::generate_sweep(spec);
}

}  // namespace

static void BM_ProcessSweep(benchmark::State& state) {
  const auto sweep = make_sweep(static_cast<std::size_t>(state.range(0)), 224);
  classifier::MockBackend backend;
  for (auto _ : state) {
    benchmark::DoNotOptimize(keyframes::process_sweep(sweep.frames, backend, {}, 16));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProcessSweep)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_PropagateLabels(benchmark::State& state) {
  const auto sweep = make_sweep(200, 64);
  std::vector<dataset::SeedAnnotation> seeds;
  for (const auto& s : sweep.truth.spans) {
    seeds.push_back({sweep.frames.source_id(), s.peak_index, s.span.label});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dataset::propagate_labels(sweep.frames, seeds, 0.5, 0.5));
  }
}
BENCHMARK(BM_PropagateLabels)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
