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

#ifndef DPACCT_NUMERIC_H_
#define DPACCT_NUMERIC_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace dpacct {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  void Add(const CompensatedSum& other) {
    Add(other.sum_);
    Add(other.compensation_);
  }
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0;
  double compensation_ = 0;
};

inline double LogSumExp(std::span<const double> terms) {
  double max = -std::numeric_limits<double>::infinity();
  for (double t : terms) max = std::max(max, t);
  if (!std::isfinite(max)) return max;
  double acc = 0;
  for (double t : terms) acc += std::exp(t - max);
  return max + std::log(acc);
}

// ln(e^a + e^b) without overflow.
inline double LogAddExp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace dpacct

#endif  // DPACCT_NUMERIC_H_
