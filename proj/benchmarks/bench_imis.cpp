#include <benchmark/benchmark.h>

#include "wirenn/harness/trace.hpp"
#include "wirenn/imis/simulator.hpp"
#include "wirenn/oracles/verify.hpp"

namespace {

void BM_ImisSimulation(benchmark::State& state) {
  auto spec = wirenn::harness::default_synth_spec(4);
  spec.flows = static_cast<std::size_t>(state.range(0));
  spec.flow_rate = 5000;
  const auto stream = wirenn::oracles::stream_from_trace(wirenn::harness::synth_trace(spec));
  const auto clf = wirenn::imis::hash_classifier(4);
  wirenn::imis::SimConfig sc;
  sc.parse_us = 1;
  sc.infer_base_us = 800;
  sc.infer_per_flow_us = 10;
  for (auto _ : state) {
    auto res = wirenn::imis::run_pipeline(stream, clf, sc);
    benchmark::DoNotOptimize(res.stats);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_ImisSimulation)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
