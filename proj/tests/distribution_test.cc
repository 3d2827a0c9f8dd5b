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

#include "dpacct/distribution.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace dpacct {
namespace {

Distribution Gauss(double mean, double sd) {
  return *Distribution::Gaussian(mean, sd);
}

Distribution Lap(double loc, double scale) {
  return *Distribution::Laplace(loc, scale);
}

TEST(DistributionTest, RejectsInvalidParameters) {
  EXPECT_FALSE(Distribution::Gaussian(0, 0).ok());
  EXPECT_FALSE(Distribution::Gaussian(0, -1).ok());
  EXPECT_FALSE(Distribution::Gaussian(NAN, 1).ok());
  EXPECT_FALSE(Distribution::Laplace(0, 0).ok());
  EXPECT_FALSE(Distribution::Laplace(INFINITY, 1).ok());
}

TEST(DistributionTest, MixtureValidation) {
  EXPECT_FALSE(Distribution::Mixture({0.5, 0.4}, {Gauss(0, 1), Gauss(1, 1)}).ok());
  EXPECT_FALSE(Distribution::Mixture({1.5, -0.5}, {Gauss(0, 1), Gauss(1, 1)}).ok());
  EXPECT_FALSE(Distribution::Mixture({1.0}, {}).ok());
  auto inner = Distribution::Mixture({0.5, 0.5}, {Gauss(0, 1), Gauss(1, 1)});
  ASSERT_TRUE(inner.ok());
  EXPECT_FALSE(Distribution::Mixture({0.5, 0.5}, {*inner, Gauss(0, 1)}).ok());
  auto coin = Distribution::Discrete({0, 1}, {Rational(1, 2), Rational(1, 2)});
  ASSERT_TRUE(coin.ok());
  EXPECT_FALSE(Distribution::Mixture({0.5, 0.5}, {*coin, Gauss(0, 1)}).ok());
  std::vector<double> w(kMaxMixtureComponents + 1,
                        1.0 / (kMaxMixtureComponents + 1));
  std::vector<Distribution> c(kMaxMixtureComponents + 1, Gauss(0, 1));
  EXPECT_FALSE(Distribution::Mixture(w, c).ok());
}

TEST(DistributionTest, DiscreteValidation) {
  EXPECT_FALSE(
      Distribution::Discrete({0, 0}, {Rational(1, 2), Rational(1, 2)}).ok());
  EXPECT_FALSE(
      Distribution::Discrete({0, 1}, {Rational(1, 2), Rational(1, 3)}).ok());
  EXPECT_FALSE(
      Distribution::Discrete({0, 1}, {Rational(3, 2), Rational(-1, 2)}).ok());
  EXPECT_FALSE(Distribution::Discrete({0, 1}, {Rational(1)}).ok());
}

TEST(DistributionTest, GaussianDensityAndTails) {
  const Distribution g = Gauss(1, 2);
  const double x = 0.3;
  const double z = (x - 1) / 2;
  const double expected =
      std::exp(-0.5 * z * z) / (2 * std::sqrt(2 * std::numbers::pi));
  EXPECT_NEAR(Pdf(g, x), expected, 1e-15);
  EXPECT_NEAR(LogPdf(g, x), std::log(expected), 1e-13);
  EXPECT_NEAR(*Cdf(g, x) + *Sf(g, x), 1.0, 1e-15);
  EXPECT_NEAR(*Cdf(g, x), 0.5 * std::erfc(-z / std::sqrt(2.0)), 1e-15);

  const Distribution n = Gauss(0, 1);
  const double far = 0.5 * std::erfc(10 / std::sqrt(2.0));
  EXPECT_NEAR(*Sf(n, 10) / far, 1.0, 1e-12);
  EXPECT_NEAR(*Cdf(n, -10) / far, 1.0, 1e-12);
  EXPECT_NEAR(LogPdf(n, 50), -1250 - 0.5 * std::log(2 * std::numbers::pi),
              1e-9);
}

TEST(DistributionTest, LaplaceCdf) {
  const Distribution l = Lap(1, 2);
  EXPECT_NEAR(*Cdf(l, 1), 0.5, 1e-15);
  EXPECT_NEAR(*Cdf(l, -1), 0.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(*Sf(l, 5), 0.5 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(Pdf(l, 3), std::exp(-1.0) / 4, 1e-15);
  EXPECT_NEAR(IntervalMass(l, -1, 5), 1 - 0.5 * std::exp(-1.0) -
                                          0.5 * std::exp(-2.0),
              1e-15);
}

TEST(DistributionTest, MixtureDensityIsWeightedSum) {
  auto m = Distribution::Mixture({0.25, 0.75}, {Gauss(0, 1), Lap(1, 0.5)});
  ASSERT_TRUE(m.ok());
  for (double x : {-2.0, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(Pdf(*m, x), 0.25 * Pdf(Gauss(0, 1), x) +
                                0.75 * Pdf(Lap(1, 0.5), x),
                1e-15);
    EXPECT_NEAR(*Cdf(*m, x), 0.25 * *Cdf(Gauss(0, 1), x) +
                                 0.75 * *Cdf(Lap(1, 0.5), x),
                1e-15);
  }
}

TEST(DistributionTest, DiscreteMassesAndUnsupportedCdf) {
  auto d = Distribution::Discrete({0, 1}, {Rational(3, 4), Rational(1, 4)});
  ASSERT_TRUE(d.ok());
  EXPECT_TRUE(d->IsDiscrete());
  EXPECT_DOUBLE_EQ(Pdf(*d, 0), 0.75);
  EXPECT_DOUBLE_EQ(Pdf(*d, 0.5), 0.0);
  EXPECT_EQ(LogPdf(*d, 0.5), -INFINITY);
  EXPECT_EQ(Cdf(*d, 0).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(Sf(*d, 0).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(DistributionTest, LogDensityRatio) {
  const Distribution p = Gauss(0, 1);
  const Distribution q = Gauss(1, 1);
  for (double x : {-3.0, 0.0, 0.5, 2.0, 40.0}) {
    EXPECT_NEAR(*LogDensityRatio(p, q, x), 0.5 - x, 1e-12);
  }
  auto a = Distribution::Discrete({0, 1}, {Rational(1), Rational(0)});
  auto b = Distribution::Discrete({0, 1}, {Rational(1, 2), Rational(1, 2)});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(*LogDensityRatio(*a, *b, 1), -INFINITY);
  EXPECT_EQ(*LogDensityRatio(*b, *a, 1), INFINITY);
  EXPECT_NEAR(*LogDensityRatio(*a, *b, 0), std::log(2.0), 1e-15);
}

TEST(DistributionTest, ShiftedMovesEveryComponent) {
  auto m = Distribution::Mixture({0.5, 0.5}, {Gauss(0, 1), Lap(2, 1)});
  ASSERT_TRUE(m.ok());
  const Distribution s = m->Shifted(3);
  for (double x : {-1.0, 2.5, 6.0}) {
    EXPECT_DOUBLE_EQ(Pdf(s, x), Pdf(*m, x - 3));
  }
}

TEST(DistributionTest, SamplingIsSeededAndUnbiased) {
  const Distribution l = Lap(1.5, 2);
  Rng a(42), b(42);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = Sample(l, a);
    EXPECT_EQ(x, Sample(l, b));
    sum += x;
  }
  // Standard deviation of the mean is 2 * sqrt(2) / sqrt(n) ~ 0.0063.
  EXPECT_NEAR(sum / n, 1.5, 0.04);
}

TEST(DistributionTest, ProductRequiresFactors) {
  EXPECT_FALSE(MakeProduct({}).ok());
  EXPECT_TRUE(MakeProduct({Gauss(0, 1)}).ok());
}

}  // namespace
}  // namespace dpacct
