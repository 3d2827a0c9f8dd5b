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

#include "dpacct/monte_carlo.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpacct/kernels.h"

namespace dpacct {

absl::Status ValidateMcConfig(const MCConfig& cfg) {
  if (!(cfg.accuracy > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("accuracy must be > 0, got ", cfg.accuracy));
  }
  if (!(cfg.confidence > 0 && cfg.confidence < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("confidence must lie in (0, 1), got ", cfg.confidence));
  }
  if (cfg.eps_grid.empty()) {
    return absl::InvalidArgumentError("eps grid is empty");
  }
  for (double e : cfg.eps_grid) {
    if (std::isnan(e)) return absl::InvalidArgumentError("eps grid has NaN");
  }
  if (cfg.samples < 0) {
    return absl::InvalidArgumentError("sample count must be >= 0");
  }
  return absl::OkStatus();
}

int64_t HoeffdingSamples(double accuracy, double confidence,
                         int64_t grid_size) {
  const double n = std::log(2.0 * static_cast<double>(grid_size) / confidence) /
                   (2.0 * accuracy * accuracy);
  return static_cast<int64_t>(std::ceil(n));
}

absl::StatusOr<McCurve> McDeltaCurve(const Distribution& p,
                                     const Distribution& q, int k,
                                     const MCConfig& cfg) {
  if (absl::Status s = ValidateMcConfig(cfg); !s.ok()) return s;
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("composition count must be >= 1, got ", k));
  }
  if (p.IsContinuous() != q.IsContinuous()) {
    return absl::InvalidArgumentError(
        "mismatched support kind: one law is continuous, one discrete");
  }
  const int64_t n =
      cfg.samples > 0
          ? cfg.samples
          : HoeffdingSamples(cfg.accuracy, cfg.confidence,
                             static_cast<int64_t>(cfg.eps_grid.size()));
  // Log-densities straight from the analytic forms; no ratio of densities.
  const kernels::LossSampler sampler = [&p, &q](Rng& rng) {
    const double x = Sample(p, rng);
    return LogPdf(p, x) - LogPdf(q, x);
  };
  const std::vector<double> means =
      kernels::McHockeyStick(sampler, k, cfg.eps_grid, n, cfg.seed);

  McCurve curve;
  curve.k = k;
  curve.samples = n;
  curve.accuracy = cfg.accuracy;
  curve.confidence = cfg.confidence;
  curve.seed = cfg.seed;
  curve.points.reserve(means.size());
  for (size_t i = 0; i < means.size(); ++i) {
    curve.points.push_back({cfg.eps_grid[i], means[i],
                            std::max(0.0, means[i] - cfg.accuracy),
                            std::min(1.0, means[i] + cfg.accuracy)});
  }
  return curve;
}

}  // namespace dpacct
