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

#include "dpacct/experiments.h"

#include <cmath>

#include "gtest/gtest.h"

namespace dpacct {
namespace {

TEST(RrOracleTest, ExactValues) {
  auto r = RrOracle();
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->h43_pq, Rational(11, 48));
  EXPECT_EQ(r->h43_qp, Rational(1, 6));
  EXPECT_EQ(r->h2_pq, Rational(1, 16));
  EXPECT_EQ(r->h2_qp, Rational(1, 8));
  EXPECT_TRUE(r->order_flips);
  EXPECT_EQ(FormatRrOracle(*r),
            "H_{4/3}(P||Q)=11/48, H_{4/3}(Q||P)=1/6, H_2(P||Q)=1/16, "
            "H_2(Q||P)=1/8");
}

TEST(Fig1Test, DeterministicCrossingWithoutMonteCarlo) {
  Fig1Options options;
  options.k_list = {1, 2};
  options.run_mc = false;
  auto result = ExperimentFig1(options);
  ASSERT_TRUE(result.ok()) << result.status();
  const Fig1Crossing& c = result->crossing;
  ASSERT_TRUE(c.found);
  EXPECT_GT(c.remove_gap, 10 * c.slack);
  EXPECT_GT(c.add_gap, 10 * c.slack);
  EXPECT_GE(c.eps_remove_above, 0);
  EXPECT_GE(c.eps_add_above, 0);
  for (const Fig1Row& row : result->rows) {
    EXPECT_EQ(row.method, "pld");
    if (row.k == 2 && row.epsilon == c.eps_remove_above) {
      EXPECT_GT(row.remove, row.add);
    }
    if (row.k == 2 && row.epsilon == c.eps_add_above) {
      EXPECT_GT(row.add, row.remove);
    }
  }
}

TEST(Fig3Test, EachCurveLeadsSomewhere) {
  auto result = ExperimentFig3(Fig3Options{});
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->rows.size(), 131u);
  for (const Fig3Interval& interval : result->intervals) {
    EXPECT_TRUE(interval.found);
    EXPECT_GT(interval.best_margin, 1e-6);
    EXPECT_LT(interval.lo, interval.hi);
  }
}

TEST(Fig4Test, UpperAboveLowerAndRoundTrip) {
  Fig4Options options;
  options.step = 1e-3;
  options.deltas = {1e-9, 1e-6, 1e-3};
  auto result = ExperimentFig4(options);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_LE(result->round_trip_error, 1e-12);
  ASSERT_EQ(result->rows.size(), 3u);
  for (const Fig4Row& row : result->rows) {
    EXPECT_GE(row.upper, row.lower);
  }
  EXPECT_GT(result->rows[1].rdp, result->rows[1].lower);
}

TEST(ConjectureTest, SingleCellPasses) {
  ConjectureOptions options;
  options.sigmas = {1.0};
  options.gammas = {0.1};
  options.ks = {4};
  auto cells = ConjectureSweep(options);
  ASSERT_TRUE(cells.ok()) << cells.status();
  ASSERT_EQ(cells->size(), 1u);
  EXPECT_TRUE((*cells)[0].passed);
  EXPECT_GE((*cells)[0].worst_margin, -options.tolerance);
}

TEST(FactorTwoTest, SingleConfiguration) {
  FactorTwoOptions options;
  options.step = 1e-3;
  auto c = FactorTwo(1.0, 0.1, 1.0, options);
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_GE(c->delta, options.min_delta);
  EXPECT_NEAR(c->ratio, 2.0, 4 * kDefaultSigmaTolerance);
  EXPECT_NEAR(c->sigma_poisson, 1.01, 0.01);
}

}  // namespace
}  // namespace dpacct
