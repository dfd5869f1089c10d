#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "probeleak/analysis.hpp"
#include "probeleak/decode.hpp"
#include "probeleak/protocol.hpp"

namespace {

using namespace probeleak;

void BM_ExactLaw(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto seq = GateSequence::from_index(sequence_count(k, ~0ull) / 2, k);
  for (auto _ : state) benchmark::DoNotOptimize(exact_law(seq, theta_star(k), 0.05));
}
BENCHMARK(BM_ExactLaw)->Arg(2)->Arg(7)->Arg(12);

void BM_LawTable(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(law_table(k, theta_star(k), 0.0));
}
BENCHMARK(BM_LawTable)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_MlDecode(benchmark::State& state) {
  const std::size_t k = 7;
  const auto table = law_table(k, theta_star(k), 0.0);
  const auto hist = sample_histogram(table.law(1234), 4096, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ml_decode(hist, table));
}
BENCHMARK(BM_MlDecode)->Unit(benchmark::kMicrosecond);

void BM_SampleHistogram(benchmark::State& state) {
  const auto law = exact_law(GateSequence::from_index(100, 7), 1.0, 0.1);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_histogram(law, static_cast<std::uint64_t>(state.range(0)), ++seed));
}
BENCHMARK(BM_SampleHistogram)->Arg(64)->Arg(4096);

void BM_Wht(benchmark::State& state) {
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  std::iota(x.begin(), x.end(), 0.0);
  for (auto _ : state) {
    wht_inplace(x);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Wht)->Arg(1 << 7)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
