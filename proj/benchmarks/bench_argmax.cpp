#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wirenn/argmax/chain.hpp"
#include "wirenn/argmax/ternary.hpp"

namespace {

std::vector<std::uint32_t> random_tuples(int n, int m, std::size_t count) {
  std::mt19937_64 rng(1);
  std::vector<std::uint32_t> v(count * static_cast<std::size_t>(n));
  for (auto& x : v) x = static_cast<std::uint32_t>(rng() & ((1ull << m) - 1));
  return v;
}

void BM_GenerateTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto t = wirenn::argmax::generate_table(n, m);
    benchmark::DoNotOptimize(t);
  }
  state.counters["entries"] = static_cast<double>(wirenn::argmax::count_entries(n, m, wirenn::argmax::OptLevel::opt1_opt2));
}
BENCHMARK(BM_GenerateTable)->Args({3, 16})->Args({4, 8})->Args({6, 4})->Unit(benchmark::kMicrosecond);

void BM_TableLookup(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const auto table = wirenn::argmax::generate_table(n, m);
  const auto tuples = random_tuples(n, m, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.lookup({tuples.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)}));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TableLookup)->Args({3, 8})->Args({4, 6})->Args({6, 4});

void BM_ChainLookup(benchmark::State& state) {
  const auto chain = wirenn::argmax::split_argmax(6, 11, 3);
  const auto tuples = random_tuples(6, 11, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain.lookup({tuples.data() + i * 6, 6}));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ChainLookup);

}  // namespace
