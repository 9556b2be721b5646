// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "seizure/kernels.hpp"
#include "seizure/preprocess.hpp"
#include "seizure/rng.hpp"

using namespace seizure;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng) * 2.0 - 1.0;
  return v;
}

std::vector<Epoch> random_epochs(std::size_t count, std::size_t channels, std::size_t samples) {
  std::vector<Epoch> epochs(count);
  std::uint64_t seed = 0;
  for (Epoch& e : epochs) {
    for (std::size_t c = 0; c < channels; ++c) e.samples.push_back(random_values(samples, seed++));
  }
  return epochs;
}

constexpr std::size_t kDim = 92;

template <auto Kernel>
void BM_SquaredDistances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * kDim, 1);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(a, a, kDim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

template <auto Kernel>
void BM_RbfGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n * kDim, 2);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(x, kDim, 1.0 / kDim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

template <auto Kernel>
void BM_EpochStatistics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto epochs = random_epochs(n, 23, 512);
  std::vector<double> out(n * 92);
  for (auto _ : state) {
    Kernel(epochs, false, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_SquaredDistances<kernels::serial::squared_distances>)->Name("squared_distances/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_SquaredDistances<kernels::squared_distances>)->Name("squared_distances/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_RbfGram<kernels::serial::rbf_gram>)->Name("rbf_gram/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_RbfGram<kernels::rbf_gram>)->Name("rbf_gram/parallel")->Arg(500)->Arg(2000);
BENCHMARK(BM_EpochStatistics<kernels::serial::epoch_statistics>)->Name("epoch_statistics/serial")->Arg(256)->Arg(1800);
BENCHMARK(BM_EpochStatistics<kernels::epoch_statistics>)->Name("epoch_statistics/parallel")->Arg(256)->Arg(1800);

BENCHMARK_MAIN();
