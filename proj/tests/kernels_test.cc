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

#include "dpacct/kernels.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace dpacct::kernels {
namespace {

class KernelsTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = MaxThreads();
    SetMaxThreads(GetParam());
  }
  void TearDown() override { SetMaxThreads(saved_); }

 private:
  int saved_ = 1;
};

std::vector<double> RandomMasses(int64_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(n);
  double total = 0;
  for (double& x : v) total += (x = u(rng));
  for (double& x : v) x /= total;
  return v;
}

TEST_P(KernelsTest, MapGridMatchesSerial) {
  std::vector<double> xs(1000);
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = 0.01 * i;
  auto fn = [](double x) { return std::sin(x) * std::exp(-x); };
  EXPECT_EQ(MapGrid(xs, fn), serial::MapGrid(xs, fn));
}

TEST_P(KernelsTest, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(5000, 0);
  ParallelFor(static_cast<int64_t>(hits.size()),
              [&](int64_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST_P(KernelsTest, DirectConvolutionMatchesSerial) {
  const std::vector<double> a = RandomMasses(300, 1);
  const std::vector<double> b = RandomMasses(200, 2);
  EXPECT_EQ(Convolve(a, b), serial::Convolve(a, b));
}

TEST_P(KernelsTest, FftConvolutionMatchesSerialToRounding) {
  const std::vector<double> a = RandomMasses(5000, 3);
  const std::vector<double> b = RandomMasses(4000, 4);
  const std::vector<double> fast = Convolve(a, b);
  const std::vector<double> slow = serial::Convolve(a, b);
  ASSERT_EQ(fast.size(), slow.size());
  ASSERT_EQ(fast.size(), a.size() + b.size() - 1);
  for (size_t i = 0; i < fast.size(); ++i) {
    EXPECT_NEAR(fast[i], slow[i], 1e-15) << i;
  }
}

TEST_P(KernelsTest, ConvolutionOfPointMassesIsExact) {
  const std::vector<double> a = {0, 1, 0};
  const std::vector<double> b = {0.25, 0.75};
  const std::vector<double> expected = {0, 0.25, 0.75, 0};
  EXPECT_EQ(Convolve(a, b), expected);
  EXPECT_TRUE(Convolve({}, b).empty());
}

TEST_P(KernelsTest, DeltaOfManyMatchesSerialAndScalar) {
  const std::vector<double> masses = RandomMasses(20000, 5);
  const LatticeView view{-1.0, 1e-4, masses, 1e-9};
  std::vector<double> eps;
  for (int j = -5; j <= 15; ++j) eps.push_back(0.1 * j);
  const std::vector<double> par = DeltaOfMany(view, eps);
  EXPECT_EQ(par, serial::DeltaOfMany(view, eps));
  for (size_t j = 0; j < eps.size(); ++j) {
    EXPECT_EQ(par[j], DeltaOf(view, eps[j]));
  }
  // Above the top atom only the infinite mass remains.
  EXPECT_DOUBLE_EQ(DeltaOf(view, 2.0), 1e-9);
}

TEST_P(KernelsTest, DeltaOfTwoAtomLattice) {
  const std::vector<double> masses = {0.5, 0.0, 0.5};
  const LatticeView view{-1.0, 1.0, masses, 0.0};
  // Only the atom at loss 1 counts for eps = 0: 0.5 (1 - e^{-1}).
  EXPECT_NEAR(DeltaOf(view, 0.0), 0.5 * (1 - std::exp(-1.0)), 1e-16);
}

TEST_P(KernelsTest, MonteCarloIsThreadCountInvariant) {
  LossSampler sampler = [](Rng& rng) {
    std::normal_distribution<double> n(0.5, 1.0);
    return n(rng);
  };
  const std::vector<double> eps = {0.0, 0.5, 1.0, 2.0};
  const int64_t n = 3 * kMcBlockSize + 123;
  const std::vector<double> par = McHockeyStick(sampler, 2, eps, n, 99);
  EXPECT_EQ(par, serial::McHockeyStick(sampler, 2, eps, n, 99));
  EXPECT_NE(par, McHockeyStick(sampler, 2, eps, n, 100));
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelsTest, ::testing::Values(1, 4));

}  // namespace
}  // namespace dpacct::kernels
