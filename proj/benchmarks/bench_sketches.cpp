#include <benchmark/benchmark.h>

#include "netsample/cm_distinct.hpp"
#include "netsample/controller.hpp"
#include "netsample/count_distinct.hpp"
#include "netsample/sample_sketch.hpp"

using namespace netsample;

static void BM_SampleAdd(benchmark::State& state) {
  SampleSketch s(SampleMode::kPacket, static_cast<unsigned>(state.range(0)), 1);
  std::uint64_t i = 0;
  for (auto _ : state) {
    s.add({i * 0x9e3779b97f4a7c15ULL, i});
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleAdd)->Arg(12)->Arg(16)->Arg(20);

static void BM_SampleMerge(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  SampleSketch a(SampleMode::kPacket, m, 1), b(SampleMode::kPacket, m, 1);
  for (std::uint64_t i = 0; i < (std::uint64_t{4} << m); ++i) (i & 1 ? a : b).add({i % 1000, i});
  for (auto _ : state) {
    auto c = a;
    c.merge_from(b);
    benchmark::DoNotOptimize(c.filled_count());
  }
}
BENCHMARK(BM_SampleMerge)->Arg(12)->Arg(16);

static void BM_GlobalSample(benchmark::State& state) {
  SampleSketch a(SampleMode::kPacket, 14, 1);
  for (std::uint64_t i = 0; i < 100000; ++i) a.add({i % 5000, i});
  for (auto _ : state) {
    GlobalSample g(a);
    benchmark::DoNotOptimize(g.v_hat());
  }
}
BENCHMARK(BM_GlobalSample);

static void BM_CountDistinctAdd(benchmark::State& state) {
  CountDistinctSketch s(12, 1);
  std::uint64_t i = 0;
  for (auto _ : state) s.add_hash(i++ * 0xbf58476d1ce4e5b9ULL);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CountDistinctAdd);

static void BM_CmDistinctAdd(benchmark::State& state) {
  CmDistinct c(0.1, 0.25, 1);
  std::uint64_t i = 0;
  for (auto _ : state) {
    c.add(i % 512, i);
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CmDistinctAdd);
BENCHMARK_MAIN();
