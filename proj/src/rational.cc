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

#include <stdexcept>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dpacct {

Rational::Rational(int64_t numerator, int64_t denominator)
    : value_(Value(numerator, denominator)) {}

absl::StatusOr<Rational> Rational::Parse(std::string_view input) {
  const absl::string_view text =
      absl::StripAsciiWhitespace(absl::string_view(input.data(), input.size()));
  std::vector<absl::string_view> parts = absl::StrSplit(text, '/');
  if (parts.empty() || parts.size() > 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a rational number: '", text, "'"));
  }
  int64_t num = 0;
  int64_t den = 1;
  if (!absl::SimpleAtoi(parts[0], &num) ||
      (parts.size() == 2 && !absl::SimpleAtoi(parts[1], &den))) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a rational number: '", text, "'"));
  }
  if (den == 0) {
    return absl::InvalidArgumentError("zero denominator");
  }
  return Rational(num, den);
}

std::string Rational::Numerator() const {
  return boost::multiprecision::numerator(value_).str();
}

std::string Rational::Denominator() const {
  return boost::multiprecision::denominator(value_).str();
}

std::string Rational::ToString() const {
  if (boost::multiprecision::denominator(value_) == 1) return Numerator();
  return absl::StrCat(Numerator(), "/", Denominator());
}

double Rational::ToDouble() const { return value_.convert_to<double>(); }

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.value_ == 0) throw std::domain_error("rational division by zero");
  value_ /= other.value_;
  return *this;
}

Rational Max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace dpacct
