#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wirenn/harness/integrated.hpp"
#include "wirenn/harness/trace.hpp"
#include "wirenn/oracles/verify.hpp"
#include "wirenn/rnn/bundle.hpp"

namespace {

void BM_ForwardWindow(benchmark::State& state) {
  wirenn::rnn::Hyperparams hp;
  hp.window = static_cast<int>(state.range(0));
  const auto b = wirenn::oracles::demo_bundle(hp, 1);
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> evs(4096 * static_cast<std::size_t>(hp.window));
  for (auto& e : evs) e = rng() & ((1u << hp.ev_width) - 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wirenn::rnn::forward_window_bits(
        b, {evs.data() + i * static_cast<std::size_t>(hp.window), static_cast<std::size_t>(hp.window)}));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardWindow)->Arg(2)->Arg(8)->Arg(16);

void BM_IntegratedEngine(benchmark::State& state) {
  const auto b = wirenn::oracles::demo_bundle(wirenn::rnn::Hyperparams{}, 1);
  auto spec = wirenn::harness::default_synth_spec(6);
  spec.flows = 2000;
  const auto trace = wirenn::harness::synth_trace(spec);
  wirenn::harness::IntegratedConfig cfg;
  cfg.cross_check_argmax = state.range(0) != 0;
  cfg.keep_decisions = false;
  for (auto _ : state) {
    auto res = wirenn::harness::run_integrated(b, trace, cfg);
    benchmark::DoNotOptimize(res.metrics);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.packets.size()));
}
BENCHMARK(BM_IntegratedEngine)->ArgName("cross_check")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
