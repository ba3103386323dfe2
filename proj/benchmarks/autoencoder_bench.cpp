#include <random>

#include <benchmark/benchmark.h>

#include "sxai/detector/autoencoder.hpp"

namespace {

sxai::Matrix window(std::size_t steps, std::size_t features) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  sxai::Matrix z(steps, features);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = nd(gen);
  return z;
}

void BM_AeForward(benchmark::State& state) {
  const auto arch = state.range(0) == 0 ? sxai::Architecture::Dense : sxai::Architecture::Lstm;
  const auto model = sxai::AEModel::create({arch, 30, 8, {16, 4}}, 1);
  const auto z = window(30, 8);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(z));
  state.SetLabel(state.range(0) == 0 ? "dense" : "lstm");
}
BENCHMARK(BM_AeForward)->Arg(0)->Arg(1);

void BM_AeGradient(benchmark::State& state) {
  const auto arch = state.range(0) == 0 ? sxai::Architecture::Dense : sxai::Architecture::Lstm;
  const auto model = sxai::AEModel::create({arch, 30, 8, {16, 4}}, 1);
  const auto z = window(30, 8);
  std::vector<double> grad(model.param_count());
  for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_gradient(z, grad));
  state.SetLabel(state.range(0) == 0 ? "dense" : "lstm");
}
BENCHMARK(BM_AeGradient)->Arg(0)->Arg(1);

}  // namespace
