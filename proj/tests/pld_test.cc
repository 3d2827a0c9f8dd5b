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

#include "dpacct/pld.h"

#include <cmath>
#include <vector>

#include "dpacct/divergence.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace dpacct {
namespace {

using ::dpacct::testing::GaussianShiftDelta;
using ::dpacct::testing::GaussianShiftDeltaQuadrature;

Distribution Gauss(double mean, double sd) {
  return *Distribution::Gaussian(mean, sd);
}

Distribution Lap(double loc, double scale) {
  return *Distribution::Laplace(loc, scale);
}

TEST(OracleTest, QuadratureMatchesClosedForm) {
  for (double sigma : {0.5, 1.0, 4.0}) {
    for (double eps : {0.0, 0.7, 2.0}) {
      EXPECT_NEAR(GaussianShiftDeltaQuadrature(sigma, eps),
                  GaussianShiftDelta(sigma, eps), 1e-13);
    }
  }
}

class GaussianPldTest
    : public ::testing::TestWithParam<std::tuple<double, Discretization>> {};

TEST_P(GaussianPldTest, MatchesQuadratureWithinSlack) {
  const auto [sigma, disc] = GetParam();
  const double step = kDefaultStep;
  auto pld = PldForPair(Gauss(0, sigma), Gauss(1, sigma), disc, step,
                        kDefaultTailMassBound);
  ASSERT_TRUE(pld.ok()) << pld.status();
  for (int j = 0; j < 20; ++j) {
    const double eps = 0.15 * j;
    const double truth = GaussianShiftDeltaQuadrature(sigma, eps);
    const double slack = GaussianShiftDeltaQuadrature(sigma, eps - step) - truth;
    const double got = DeltaOf(*pld, eps);
    EXPECT_GE(got, truth - 1e-12) << "eps=" << eps;
    EXPECT_LE(got, truth + slack + 1e-6) << "eps=" << eps;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Sigmas, GaussianPldTest,
    ::testing::Combine(::testing::Values(0.5, 1.0, 4.0),
                       ::testing::Values(Discretization::kBucket,
                                         Discretization::kConnectTheDots)));

TEST(PldTest, MassIsConserved) {
  const std::vector<std::pair<Distribution, Distribution>> pairs = {
      {Gauss(0, 1), Gauss(1, 1)},
      {Lap(0, 1), *Distribution::Mixture({0.9, 0.1}, {Lap(0, 1), Lap(1, 1)})},
      {*Distribution::Mixture({0.5, 0.5}, {Lap(-1, 2), Lap(1, 2)}), Lap(-1, 2)},
  };
  for (const auto& [p, q] : pairs) {
    for (Discretization disc :
         {Discretization::kBucket, Discretization::kConnectTheDots}) {
      auto pld = PldForPair(p, q, disc, 1e-3, kDefaultTailMassBound);
      ASSERT_TRUE(pld.ok()) << pld.status();
      EXPECT_NEAR(pld->TotalMass() + pld->mass_inf, 1.0, 1e-12);
      EXPECT_LE(pld->mass_inf, kDefaultTailMassBound);
      EXPECT_TRUE(ValidatePld(*pld).ok());
      auto composed = SelfCompose(*pld, 7);
      ASSERT_TRUE(composed.ok()) << composed.status();
      EXPECT_NEAR(composed->TotalMass() + composed->mass_inf, 1.0, 1e-12);
    }
  }
}

TEST(PldTest, DominatesTrueCurveOfMixturePair) {
  auto p = Distribution::Mixture({0.7, 0.3}, {Lap(0, 1), Lap(1, 1)});
  ASSERT_TRUE(p.ok());
  const Distribution q = Lap(0, 1);
  for (Discretization disc :
       {Discretization::kBucket, Discretization::kConnectTheDots}) {
    auto pld = PldForPair(*p, q, disc, 1e-3, kDefaultTailMassBound);
    ASSERT_TRUE(pld.ok());
    for (int j = 0; j <= 120; ++j) {
      const double eps = -0.3 + 0.01 * j;
      auto truth = HockeyStick(*p, q, std::exp(eps));
      ASSERT_TRUE(truth.ok());
      EXPECT_GE(DeltaOf(*pld, eps), *truth - 1e-12) << eps;
    }
  }
}

TEST(PldTest, ComposedGaussianDominatesAndStaysClose) {
  // k-fold composition of the shift pair is the shift pair at sigma/sqrt(k).
  const double sigma = 2.0;
  const int64_t k = 16;
  auto pld = PldFromPairConnectTheDots(Gauss(0, sigma), Gauss(1, sigma));
  ASSERT_TRUE(pld.ok());
  auto composed = SelfCompose(*pld, k);
  ASSERT_TRUE(composed.ok()) << composed.status();
  for (double eps : {0.0, 0.25, 0.5, 1.0, 2.0, 3.0}) {
    const double truth = GaussianShiftDelta(sigma / 4, eps);
    const double got = DeltaOf(*composed, eps);
    EXPECT_GE(got, truth - 1e-12);
    EXPECT_LE(got, GaussianShiftDelta(sigma / 4, eps - k * kDefaultStep) + 1e-9);
  }
}

TEST(PldTest, PointMassIsCompositionIdentity) {
  auto pld = PldFromPair(Gauss(0, 1), Gauss(1, 1), 1e-3);
  ASSERT_TRUE(pld.ok());
  auto same = Compose(*pld, PointMassPld(1e-3));
  ASSERT_TRUE(same.ok());
  for (double eps : {0.0, 0.5, 1.5}) {
    EXPECT_NEAR(DeltaOf(*same, eps), DeltaOf(*pld, eps), 1e-14);
  }
  auto one = SelfCompose(*pld, 1);
  ASSERT_TRUE(one.ok());
  EXPECT_NEAR(DeltaOf(*one, 0.3), DeltaOf(*pld, 0.3), 1e-15);
}

TEST(PldTest, ComposeRejectsMismatchedSteps) {
  auto a = PldFromPair(Gauss(0, 1), Gauss(1, 1), 1e-3);
  auto b = PldFromPair(Gauss(0, 1), Gauss(1, 1), 2e-3);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(Compose(*a, *b).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(SelfCompose(*a, 0).ok());
}

TEST(PldTest, ConnectTheDotsRoundTrip) {
  std::vector<double> grid;
  std::vector<double> deltas;
  for (int j = 0; j <= 400; ++j) {
    const double eps = -1 + 0.01 * j;
    grid.push_back(eps);
    deltas.push_back(GaussianShiftDelta(0.8, eps));
  }
  auto pld = PldFromDeltaCurve(grid, deltas);
  ASSERT_TRUE(pld.ok()) << pld.status();
  for (size_t j = 0; j < grid.size(); ++j) {
    EXPECT_NEAR(DeltaOf(*pld, grid[j]), deltas[j], 1e-12);
  }
  // Between grid points the interpolant sits above the convex curve.
  for (size_t j = 0; j + 1 < grid.size(); j += 37) {
    const double mid = 0.5 * (grid[j] + grid[j + 1]);
    EXPECT_GE(DeltaOf(*pld, mid), GaussianShiftDelta(0.8, mid) - 1e-14);
  }
}

TEST(PldTest, ConnectTheDotsRejectsNonConvexCurve) {
  const std::vector<double> grid = {0.0, 0.1, 0.2};
  const std::vector<double> deltas = {0.1, 0.05, 0.04};
  const std::vector<double> bad = {0.1, 0.09, 0.04};
  EXPECT_TRUE(PldFromDeltaCurve(grid, deltas).ok());
  EXPECT_EQ(PldFromDeltaCurve(grid, bad).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(PldTest, EpsilonOfInvertsDeltaOf) {
  auto pld = PldFromPairConnectTheDots(Gauss(0, 1), Gauss(1, 1));
  ASSERT_TRUE(pld.ok());
  double last = INFINITY;
  for (double delta : {1e-9, 1e-6, 1e-3, 0.1, 0.3}) {
    auto eps = EpsilonOf(*pld, delta);
    ASSERT_TRUE(eps.ok()) << eps.status();
    EXPECT_LE(DeltaOf(*pld, *eps), delta * (1 + 1e-12));
    EXPECT_GT(DeltaOf(*pld, *eps - pld->step), delta * (1 - 1e-12));
    EXPECT_LT(*eps, last);
    last = *eps;
  }
  EXPECT_EQ(*EpsilonOf(*pld, 1.0), -INFINITY);
}

TEST(PldTest, JsonRoundTripIsExact) {
  auto pld = PldFromPair(Lap(0, 1), Lap(1, 1), 1e-3);
  ASSERT_TRUE(pld.ok());
  auto back = PldFromJson(PldToJson(*pld));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->loss_start, pld->loss_start);
  EXPECT_EQ(back->step, pld->step);
  EXPECT_EQ(back->masses, pld->masses);
  EXPECT_EQ(back->mass_inf, pld->mass_inf);
  EXPECT_FALSE(PldFromJson("[1, 2]").ok());
  EXPECT_FALSE(PldFromJson("{not json").ok());
}

TEST(PldTest, ValidateRejectsBadLattices) {
  DiscretePLD pld = PointMassPld();
  EXPECT_TRUE(ValidatePld(pld).ok());
  pld.masses = {0.5, -0.1, 0.6};
  EXPECT_FALSE(ValidatePld(pld).ok());
  pld.masses = {0.5, 0.2};
  EXPECT_FALSE(ValidatePld(pld).ok());
  pld = PointMassPld();
  pld.step = 0;
  EXPECT_FALSE(ValidatePld(pld).ok());
}

TEST(PldTest, DiscretizationNames) {
  EXPECT_EQ(*ParseDiscretization("bucket"), Discretization::kBucket);
  EXPECT_EQ(*ParseDiscretization(DiscretizationName(
                Discretization::kConnectTheDots)),
            Discretization::kConnectTheDots);
  EXPECT_FALSE(ParseDiscretization("nearest").ok());
}

}  // namespace
}  // namespace dpacct
