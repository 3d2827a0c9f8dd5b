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

#include "dpacct/pairs.h"

#include <cmath>
#include <vector>

#include "dpacct/divergence.h"
#include "gtest/gtest.h"

namespace dpacct {
namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double GaussianDelta(double sigma, double eps) {
  const double mu = 1 / sigma;
  return Phi(-eps / mu + mu / 2) - std::exp(eps) * Phi(-eps / mu - mu / 2);
}

const std::vector<double> kGrid = {0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 3.5};

std::vector<double> Deltas(const DominatingPair& pair) {
  auto curve = PairCurve(pair, kGrid);
  EXPECT_TRUE(curve.ok()) << curve.status();
  std::vector<double> out;
  for (const CurvePoint& pt : curve->points) out.push_back(pt.delta);
  return out;
}

TEST(PairsTest, FullBatchGaussianIsPlainShift) {
  const MechanismSpec mech = *MechanismSpec::Gaussian(0.9);
  const SamplingScheme full = *SamplingScheme::Poisson(1.0);
  const std::vector<double> add = Deltas(PairAdd(mech, full));
  const std::vector<double> remove = Deltas(PairRemove(mech, full));
  for (size_t i = 0; i < kGrid.size(); ++i) {
    EXPECT_NEAR(add[i], GaussianDelta(0.9, kGrid[i]), 1e-12);
    EXPECT_NEAR(remove[i], GaussianDelta(0.9, kGrid[i]), 1e-12);
  }
}

TEST(PairsTest, PoissonRemoveFollowsAmplificationIdentity) {
  // H_a((1-g) Q + g P || Q) = g H_{1 + (a-1)/g}(P || Q) for a >= 1.
  const double sigma = 1.3;
  const double gamma = 0.2;
  const MechanismSpec mech = *MechanismSpec::Gaussian(sigma);
  const std::vector<double> remove =
      Deltas(PairRemove(mech, *SamplingScheme::Poisson(gamma)));
  for (size_t i = 0; i < kGrid.size(); ++i) {
    const double alpha = std::exp(kGrid[i]);
    const double base_eps = std::log1p((alpha - 1) / gamma);
    EXPECT_NEAR(remove[i], gamma * GaussianDelta(sigma, base_eps), 1e-12)
        << kGrid[i];
  }
}

TEST(PairsTest, WorPairIsPoissonPairAtHalfNoise) {
  for (NoiseKind noise : {NoiseKind::kGaussian, NoiseKind::kLaplace}) {
    const MechanismSpec wide{noise, 2.0};
    const MechanismSpec narrow{noise, 1.0};
    const double gamma = 0.1;
    const std::vector<double> wor =
        Deltas(PairAdd(wide, *SamplingScheme::Wor(gamma)));
    const std::vector<double> poisson =
        Deltas(PairAdd(narrow, *SamplingScheme::Poisson(gamma)));
    for (size_t i = 0; i < kGrid.size(); ++i) {
      EXPECT_NEAR(wor[i], poisson[i], 1e-12);
    }
  }
}

TEST(PairsTest, RemoveSwapsTheAddPair) {
  const MechanismSpec mech = *MechanismSpec::Laplace(1.0);
  const SamplingScheme scheme = *SamplingScheme::Poisson(0.3);
  const DominatingPair add = PairAdd(mech, scheme);
  const DominatingPair remove = PairRemove(mech, scheme);
  for (double x : {-2.0, 0.0, 0.4, 1.0, 3.0}) {
    EXPECT_DOUBLE_EQ(Pdf(add.p, x), Pdf(remove.q, x));
    EXPECT_DOUBLE_EQ(Pdf(add.q, x), Pdf(remove.p, x));
  }
  EXPECT_TRUE(add.tight);
  EXPECT_TRUE(remove.tight);
}

TEST(PairsTest, PoissonSubstitutionRejectsLaplace) {
  EXPECT_EQ(PairSubstitutionPoisson(*MechanismSpec::Laplace(1), 0.1)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE(PairSubstitutionPoisson(*MechanismSpec::Gaussian(1), 0.1).ok());
}

// The add and remove pairs bound the mechanism on every concrete neighbor:
// a record with value x in [-1, 1] next to a batch sum s.
TEST(PairsTest, PairsDominateConcreteNeighbors) {
  const double sigma = 0.7;
  const double gamma = 0.25;
  const MechanismSpec mech = *MechanismSpec::Gaussian(sigma);
  const SamplingScheme scheme = *SamplingScheme::Poisson(gamma);
  const std::vector<double> remove_bound = Deltas(PairRemove(mech, scheme));
  const std::vector<double> add_bound = Deltas(PairAdd(mech, scheme));
  for (double x : {-1.0, -0.4, 0.3, 1.0}) {
    for (double s : {0.0, 2.5}) {
      auto with = Distribution::Mixture({1 - gamma, gamma},
                                        {mech.Noise(s), mech.Noise(s + x)});
      ASSERT_TRUE(with.ok());
      const Distribution without = mech.Noise(s);
      for (size_t i = 0; i < kGrid.size(); ++i) {
        const double alpha = std::exp(kGrid[i]);
        auto removed = HockeyStick(*with, without, alpha);
        auto added = HockeyStick(without, *with, alpha);
        ASSERT_TRUE(removed.ok() && added.ok());
        EXPECT_LE(*removed, remove_bound[i] + 1e-12);
        EXPECT_LE(*added, add_bound[i] + 1e-12);
      }
    }
  }
}

TEST(PairsTest, CombinedSubstitutionCurveTakesBranchMaximum) {
  const MechanismSpec mech = *MechanismSpec::Gaussian(1.5);
  const double gamma = 0.05;
  const std::vector<double> grid = {-1.0, -0.1, 0.0, 0.1, 1.0};
  auto combined = CombinedSubstitutionCurve(mech, gamma, grid);
  ASSERT_TRUE(combined.ok()) << combined.status();
  EXPECT_FALSE(combined->tight);
  const SubstitutionWorBounds bounds = PairSubstitutionWorBounds(mech, gamma);
  auto hi = PairCurve(bounds.alpha_ge_1, grid);
  auto lo = PairCurve(bounds.alpha_lt_1, grid);
  ASSERT_TRUE(hi.ok() && lo.ok());
  for (size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(combined->points[i].delta,
                std::max(hi->points[i].delta, lo->points[i].delta), 1e-14);
    if (grid[i] >= 0) {
      EXPECT_NEAR(combined->points[i].delta, hi->points[i].delta, 1e-14);
    }
  }
  const std::vector<double> unsorted = {0.5, 0.1};
  EXPECT_EQ(CombinedSubstitutionCurve(mech, gamma, unsorted).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PairsTest, ZeroSamplingRateGivesZeroCurve) {
  const MechanismSpec mech = *MechanismSpec::Gaussian(1.0);
  for (double d : Deltas(PairAdd(mech, *SamplingScheme::Poisson(0.0)))) {
    EXPECT_NEAR(d, 0.0, 1e-15);
  }
}

}  // namespace
}  // namespace dpacct
