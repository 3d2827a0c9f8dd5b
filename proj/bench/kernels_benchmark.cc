// Copyright 2026 The dpacct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts. The second
// benchmark argument selects the implementation: 0 serial, 1 parallel.

#include <cmath>
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "dpacct/kernels.h"

namespace dpacct::kernels {
namespace {

std::vector<double> RandomMasses(int64_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(n);
  double total = 0;
  for (double& x : v) total += (x = u(rng));
  for (double& x : v) x /= total;
  return v;
}

void BM_Convolve(benchmark::State& state) {
  const std::vector<double> a = RandomMasses(state.range(0));
  const std::vector<double> b = RandomMasses(state.range(0));
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? Convolve(a, b)
                                      : serial::Convolve(a, b));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Convolve)
    ->ArgsProduct({{1 << 10, 1 << 14}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_DeltaOfMany(benchmark::State& state) {
  const std::vector<double> masses = RandomMasses(state.range(0));
  const LatticeView view{-2.0, 1e-4, masses, 0.0};
  std::vector<double> eps(200);
  for (size_t i = 0; i < eps.size(); ++i) eps[i] = 0.01 * i;
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? DeltaOfMany(view, eps)
                                      : serial::DeltaOfMany(view, eps));
  }
}
BENCHMARK(BM_DeltaOfMany)
    ->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_McHockeyStick(benchmark::State& state) {
  const LossSampler sampler = [](Rng& rng) {
    std::normal_distribution<double> n(0.5, 1.0);
    return n(rng);
  };
  const std::vector<double> eps = {0.0, 0.25, 0.5, 1.0};
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        parallel ? McHockeyStick(sampler, 2, eps, state.range(0), 1)
                 : serial::McHockeyStick(sampler, 2, eps, state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McHockeyStick)
    ->ArgsProduct({{1 << 20}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_MapGrid(benchmark::State& state) {
  std::vector<double> xs(state.range(0));
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = 1e-3 * i;
  const auto fn = [](double x) { return std::erfc(x) * std::exp(-x * x); };
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? MapGrid(xs, fn)
                                      : serial::MapGrid(xs, fn));
  }
}
BENCHMARK(BM_MapGrid)
    ->ArgsProduct({{1 << 16}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpacct::kernels

BENCHMARK_MAIN();
