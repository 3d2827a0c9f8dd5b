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

#include "dpacct/rational.h"

#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"

namespace dpacct {
namespace {

TEST(RationalTest, ReducesToLowestTerms) {
  const Rational r(6, 8);
  EXPECT_EQ(r.Numerator(), "3");
  EXPECT_EQ(r.Denominator(), "4");
  EXPECT_EQ(r.ToString(), "3/4");
  EXPECT_EQ(Rational(4, 2).ToString(), "2");
}

TEST(RationalTest, ArithmeticIsExact) {
  const Rational third(1, 3);
  const Rational sum = third + third + third;
  EXPECT_EQ(sum, Rational(1));
  EXPECT_EQ(Rational(3, 4) * Rational(2, 3), Rational(1, 2));
  EXPECT_EQ(Rational(1, 2) - Rational(3, 4), Rational(-1, 4));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_TRUE((Rational(1, 2) - Rational(1, 2)).IsZero());
  EXPECT_TRUE((-Rational(1, 7)).IsNegative());
}

TEST(RationalTest, OrderingAndMax) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
  EXPECT_EQ(Max(Rational(11, 48), Rational(1, 6)), Rational(11, 48));
}

TEST(RationalTest, LargeProductsDoNotOverflow) {
  Rational r(1);
  for (int i = 0; i < 40; ++i) r *= Rational(3, 4);
  Rational back = r;
  for (int i = 0; i < 40; ++i) back /= Rational(3, 4);
  EXPECT_EQ(back, Rational(1));
  EXPECT_NEAR(r.ToDouble(), std::pow(0.75, 40), 1e-25);
}

TEST(RationalTest, ParseAcceptsFractionsAndIntegers) {
  auto r = Rational::Parse(" 11/48 ");
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(*r, Rational(11, 48));
  auto n = Rational::Parse("-5");
  ASSERT_TRUE(n.ok());
  EXPECT_EQ(*n, Rational(-5));
}

TEST(RationalTest, ParseRejectsMalformedInput) {
  EXPECT_FALSE(Rational::Parse("1/0").ok());
  EXPECT_FALSE(Rational::Parse("abc").ok());
  EXPECT_FALSE(Rational::Parse("1/2/3").ok());
  EXPECT_FALSE(Rational::Parse("0.5").ok());
}

TEST(RationalTest, DivisionByZeroThrows) {
  Rational r(1, 2);
  EXPECT_THROW(r /= Rational(0), std::domain_error);
}

}  // namespace
}  // namespace dpacct
