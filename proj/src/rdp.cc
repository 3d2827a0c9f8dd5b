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

#include "dpacct/rdp.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpacct/numeric.h"

namespace dpacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double RdpGaussian(double sigma, double order) {
  return order / (2.0 * sigma * sigma);
}

absl::StatusOr<double> RdpSubsampledGaussian(double sigma, double gamma,
                                             int order) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be finite and > 0, got ", sigma));
  }
  if (!(gamma >= 0 && gamma <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in [0, 1], got ", gamma));
  }
  if (order < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", order));
  }
  if (gamma == 0) return 0.0;
  const double log_g = std::log(gamma);
  const double log_1mg = gamma == 1 ? -kInf : std::log1p(-gamma);
  std::vector<double> terms;
  terms.reserve(order + 1);
  for (int j = 0; j <= order; ++j) {
    const double tail = order - j == 0 ? 0.0 : (order - j) * log_1mg;
    const double head = j == 0 ? 0.0 : j * log_g;
    terms.push_back(LogBinomial(order, j) + tail + head +
                    j * (j - 1.0) / (2.0 * sigma * sigma));
  }
  const double log_sum = LogSumExp(terms);
  if (!std::isfinite(log_sum)) {
    return absl::OutOfRangeError(absl::StrCat(
        "subsampled Gaussian RDP overflows at order ", order));
  }
  return std::max(0.0, log_sum / (order - 1.0));
}

absl::StatusOr<RdpProfile> SubsampledGaussianProfile(double sigma,
                                                     double gamma, int64_t k,
                                                     int min_order,
                                                     int max_order) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("composition count must be >= 1, got ", k));
  }
  if (min_order < 2 || max_order < min_order) {
    return absl::InvalidArgumentError("invalid order range");
  }
  RdpProfile profile;
  profile.k = k;
  for (int a = min_order; a <= max_order; ++a) {
    absl::StatusOr<double> v = RdpSubsampledGaussian(sigma, gamma, a);
    if (!v.ok()) return v.status();
    profile.orders.push_back(a);
    profile.values.push_back(*v);
  }
  return profile;
}

absl::StatusOr<double> RdpToDp(const RdpProfile& profile, double delta) {
  if (profile.orders.empty() ||
      profile.orders.size() != profile.values.size()) {
    return absl::InvalidArgumentError("empty or ragged RDP profile");
  }
  if (!(delta > 0 && delta <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1], got ", delta));
  }
  double best = kInf;
  for (size_t i = 0; i < profile.orders.size(); ++i) {
    const double a = profile.orders[i];
    if (!(a > 1)) {
      return absl::InvalidArgumentError("RDP orders must be > 1");
    }
    const double eps = static_cast<double>(profile.k) * profile.values[i] +
                       std::log(1.0 / (a * delta)) / (a - 1.0) +
                       std::log1p(-1.0 / a);
    best = std::min(best, eps);
  }
  return std::max(0.0, best);
}

}  // namespace dpacct
