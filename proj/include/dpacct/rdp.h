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

// Renyi-DP accountant for the Poisson-subsampled Gaussian mechanism with
// unit sensitivity, used as a reference line.

#ifndef DPACCT_RDP_H_
#define DPACCT_RDP_H_

#include <vector>

#include "absl/status/statusor.h"

namespace dpacct {

inline constexpr int kDefaultMinOrder = 2;
inline constexpr int kDefaultMaxOrder = 256;

struct RdpProfile {
  std::vector<double> orders;
  std::vector<double> values;  // per-iteration RDP epsilon at each order
  int64_t k = 1;
};

// order / (2 sigma^2).
double RdpGaussian(double sigma, double order);

// (1 / (a - 1)) ln sum_{j=0}^{a} C(a, j) (1-g)^{a-j} g^j e^{j(j-1) / (2 s^2)}
// for integer order a >= 2, summed in log space. kOutOfRange if the result
// overflows.
absl::StatusOr<double> RdpSubsampledGaussian(double sigma, double gamma,
                                             int order);

// Profile over integer orders [min_order, max_order].
absl::StatusOr<RdpProfile> SubsampledGaussianProfile(
    double sigma, double gamma, int64_t k, int min_order = kDefaultMinOrder,
    int max_order = kDefaultMaxOrder);

// min over orders of k v + ln(1 / (a delta)) / (a - 1) + ln(1 - 1/a),
// clipped at 0.
absl::StatusOr<double> RdpToDp(const RdpProfile& profile, double delta);

}  // namespace dpacct

#endif  // DPACCT_RDP_H_
