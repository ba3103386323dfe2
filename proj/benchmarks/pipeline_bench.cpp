#include <benchmark/benchmark.h>

#include "sxai/data/synth.hpp"
#include "sxai/pipeline/pipeline.hpp"

namespace {

void BM_PipelineThroughput(benchmark::State& state) {
  sxai::GeneratorConfig g;
  g.duration = 20000;
  g.faults = sxai::parse_fault_spec("air_leak:12000-15000:1.0:0.3");
  const auto stream = sxai::synth_generate(g);
  sxai::PipelineConfig config;
  config.detector.shape = {sxai::Architecture::Dense, 20, 16, {16, 6}};
  config.detector.train.epochs = 5;
  config.train_windows = 100;
  config.mode = state.range(0) == 0 ? sxai::ExecutionMode::Sequential : sxai::ExecutionMode::Parallel;
  const auto trained = sxai::train_detector(stream.records, config);
  const auto online = std::span<const sxai::RawRecord>(stream.records).subspan(trained.consumed);
  for (auto _ : state) benchmark::DoNotOptimize(sxai::run_online(online, config, trained.bundle));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * online.size()));
  state.SetLabel(state.range(0) == 0 ? "sequential" : "parallel");
}
BENCHMARK(BM_PipelineThroughput)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
