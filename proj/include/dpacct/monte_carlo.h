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

// Monte Carlo estimates of composed hockey-stick divergences. With
// Y = sum of k single-step losses ln(p/q)(X), X ~ p,
//
//   H_{e^eps}(P^k || Q^k) = E[(1 - e^{eps - Y})_+],
//
// and the Hoeffding bound makes N = ceil(ln(2|E| / beta) / (2 a^2)) samples
// accurate within a for every eps in E simultaneously with probability
// 1 - beta.

#ifndef DPACCT_MONTE_CARLO_H_
#define DPACCT_MONTE_CARLO_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpacct/distribution.h"

namespace dpacct {

struct MCConfig {
  double accuracy = 0.001;
  double confidence = 0.01;
  std::vector<double> eps_grid;
  uint64_t seed = 0;
  // Overrides the Hoeffding sample count when positive.
  int64_t samples = 0;
};

absl::Status ValidateMcConfig(const MCConfig& cfg);

int64_t HoeffdingSamples(double accuracy, double confidence,
                         int64_t grid_size);

struct McCurvePoint {
  double epsilon;
  double delta;
  double lower;  // max(0, delta - accuracy)
  double upper;  // min(1, delta + accuracy)
};

struct McCurve {
  std::vector<McCurvePoint> points;
  int k = 1;
  int64_t samples = 0;
  double accuracy = 0;
  double confidence = 0;
  uint64_t seed = 0;
};

// Deterministic for a fixed config, independent of the thread count.
absl::StatusOr<McCurve> McDeltaCurve(const Distribution& p,
                                     const Distribution& q, int k,
                                     const MCConfig& cfg);

}  // namespace dpacct

#endif  // DPACCT_MONTE_CARLO_H_
