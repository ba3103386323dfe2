#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "sxai/rules/amrules.hpp"
#include "sxai/sampling/chebyshev.hpp"

namespace {

struct Stream {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};

Stream make_stream(std::size_t features, std::size_t n) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  Stream s;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(features);
    for (auto& v : x) v = nd(gen);
    s.y.push_back((x[0] > 0.5 ? 2.0 : 0.0) + 0.3 * x[1] + 0.1 * nd(gen));
    s.x.push_back(std::move(x));
  }
  return s;
}

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("f" + std::to_string(i));
  return out;
}

void BM_AMRulesLearnOne(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto s = make_stream(f, 8192);
  sxai::AMRules m(names(f));
  std::size_t i = 0;
  for (auto _ : state) {
    m.learn_one(s.x[i], s.y[i]);
    i = (i + 1) % s.y.size();
  }
  state.counters["rules"] = static_cast<double>(m.rule_count());
}
BENCHMARK(BM_AMRulesLearnOne)->Arg(8)->Arg(64);

void BM_OversampledLearnOne(benchmark::State& state) {
  const auto s = make_stream(64, 8192);
  sxai::AMRules m(names(64));
  sxai::ChebyshevOversampler os;
  std::size_t i = 0;
  for (auto _ : state) {
    os.learn(m, s.x[i], s.y[i]);
    i = (i + 1) % s.y.size();
  }
}
BENCHMARK(BM_OversampledLearnOne);

}  // namespace
