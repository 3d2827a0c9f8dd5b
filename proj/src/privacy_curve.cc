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

#include "dpacct/privacy_curve.h"

#include <cmath>

#include "absl/strings/str_format.h"

namespace dpacct {

absl::Status CheckStrictlyIncreasing(std::span<const double> grid,
                                     std::string_view what) {
  if (grid.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat("%s is empty", std::string(what)));
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s[%d] is not finite", std::string(what), i));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s not sorted: entry %d (%g) <= entry %d (%g)", std::string(what), i, grid[i],
          i - 1, grid[i - 1]));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidatePrivacyCurve(std::span<const CurvePoint> points,
                                  double tol) {
  std::vector<double> eps;
  eps.reserve(points.size());
  for (const CurvePoint& p : points) eps.push_back(p.epsilon);
  if (absl::Status s = CheckStrictlyIncreasing(eps, "curve epsilons"); !s.ok()) {
    return s;
  }
  for (size_t i = 0; i < points.size(); ++i) {
    const double d = points[i].delta;
    if (!(d >= -tol && d <= 1 + tol)) {
      return absl::FailedPreconditionError(
          absl::StrFormat("delta %g at eps %g outside [0, 1]", d, eps[i]));
    }
    if (i > 0 && d > points[i - 1].delta + tol) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "delta increases between eps %g and %g", eps[i - 1], eps[i]));
    }
  }
  // Convexity in t = e^eps: the chord slopes must not decrease.
  for (size_t i = 1; i + 1 < points.size(); ++i) {
    const double t0 = std::exp(eps[i - 1]);
    const double t1 = std::exp(eps[i]);
    const double t2 = std::exp(eps[i + 1]);
    // Interpolated chord value at t1 must dominate the curve there.
    const double w = (t1 - t0) / (t2 - t0);
    const double chord =
        (1 - w) * points[i - 1].delta + w * points[i + 1].delta;
    if (points[i].delta > chord + tol) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "delta not convex in e^eps around eps %g (%.17g > chord %.17g)",
          eps[i], points[i].delta, chord));
    }
  }
  return absl::OkStatus();
}

}  // namespace dpacct
