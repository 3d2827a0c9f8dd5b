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

#ifndef DPACCT_PRIVACY_CURVE_H_
#define DPACCT_PRIVACY_CURVE_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "dpacct/mechanism.h"

namespace dpacct {

struct CurvePoint {
  double epsilon;
  double delta;
};

// Sampled privacy curve delta(epsilon) with the setting it belongs to.
struct PrivacyCurve {
  std::vector<CurvePoint> points;
  Relation relation = Relation::kAddRemove;
  SamplingScheme scheme;
  int k = 1;
  bool tight = true;
  std::string direction;
};

// Checks that epsilons strictly increase, deltas lie in [0, 1] and do not
// increase, and that delta is convex in e^epsilon, all up to `tol`.
absl::Status ValidatePrivacyCurve(std::span<const CurvePoint> points,
                                  double tol = 1e-9);

// Strictly increasing check shared by every epsilon-grid input.
absl::Status CheckStrictlyIncreasing(std::span<const double> grid,
                                     std::string_view what = "eps_grid");

}  // namespace dpacct

#endif  // DPACCT_PRIVACY_CURVE_H_
