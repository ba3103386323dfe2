#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sxai/rules/tebst.hpp"

namespace {

void BM_TebstInsert(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  std::vector<double> xs(4096), ys(4096);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = nd(gen);
    ys[i] = nd(gen);
  }
  sxai::TebstSplitter t;
  std::size_t i = 0;
  for (auto _ : state) {
    t.insert(xs[i], ys[i]);
    i = (i + 1) & 4095;
  }
}
BENCHMARK(BM_TebstInsert);

void BM_TebstBestSplit(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  sxai::TebstSplitter t({3, static_cast<std::size_t>(state.range(0))});
  for (int i = 0; i < 10000; ++i) t.insert(nd(gen), nd(gen));
  for (auto _ : state) benchmark::DoNotOptimize(t.best_split());
}
BENCHMARK(BM_TebstBestSplit)->Arg(100)->Arg(1000);

}  // namespace
