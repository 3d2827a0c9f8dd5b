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

#ifndef DPACCT_RATIONAL_H_
#define DPACCT_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "boost/multiprecision/cpp_int.hpp"

namespace dpacct {

// Exact rational number with arbitrary-precision numerator and denominator.
// Always kept in reduced form with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(int64_t value) : value_(value) {}  // NOLINT: implicit on purpose
  Rational(int64_t numerator, int64_t denominator);

  // Parses "a/b" or "a".
  static absl::StatusOr<Rational> Parse(std::string_view text);

  std::string Numerator() const;
  std::string Denominator() const;
  std::string ToString() const;
  double ToDouble() const;

  bool IsZero() const { return value_ == 0; }
  bool IsNegative() const { return value_ < 0; }

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(-a.value_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  using Value = boost::multiprecision::cpp_rational;
  explicit Rational(Value value) : value_(std::move(value)) {}

  Value value_{0};
};

Rational Max(const Rational& a, const Rational& b);

}  // namespace dpacct

#endif  // DPACCT_RATIONAL_H_
