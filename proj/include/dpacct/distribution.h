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

// One-dimensional probability laws used as mechanism outputs: Gaussian,
// Laplace, finite mixtures of those, and finite discrete laws with exact
// rational masses. Values are immutable once constructed through the
// validating factories below.

#ifndef DPACCT_DISTRIBUTION_H_
#define DPACCT_DISTRIBUTION_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpacct/rational.h"

namespace dpacct {

class Distribution;

struct GaussianLaw {
  double mean;
  double stddev;
};

struct LaplaceLaw {
  double location;
  double scale;
};

struct MixtureLaw {
  std::vector<double> weights;
  std::vector<Distribution> components;
};

struct DiscreteLaw {
  std::vector<double> outcomes;
  std::vector<Rational> probs;
  // Floating point copy of `probs`, kept in sync by the factory.
  std::vector<double> probs_double;
};

// Mixtures hold at most this many components.
inline constexpr int kMaxMixtureComponents = 8;

class Distribution {
 public:
  using Law = std::variant<GaussianLaw, LaplaceLaw, MixtureLaw, DiscreteLaw>;

  static absl::StatusOr<Distribution> Gaussian(double mean, double stddev);
  static absl::StatusOr<Distribution> Laplace(double location, double scale);
  // Components must all be continuous or all discrete, and none may itself
  // be a mixture. Weights must be nonnegative and sum to 1 within 1e-12.
  static absl::StatusOr<Distribution> Mixture(
      std::vector<double> weights, std::vector<Distribution> components);
  // Outcome labels must be distinct; probabilities must sum to exactly 1.
  static absl::StatusOr<Distribution> Discrete(std::vector<double> outcomes,
                                               std::vector<Rational> probs);

  const Law& law() const { return law_; }
  bool IsContinuous() const;
  bool IsDiscrete() const { return !IsContinuous(); }
  bool IsMixture() const { return std::holds_alternative<MixtureLaw>(law_); }

  // Location/scale pairs of every atomic continuous component; used to size
  // integration windows and to place kinks of Laplace densities.
  std::vector<std::pair<double, double>> LocationScales() const;

  // Returns a copy translated by `shift`.
  Distribution Shifted(double shift) const;

  std::string DebugString() const;

 private:
  explicit Distribution(Law law) : law_(std::move(law)) {}
  Law law_;
};

// Product of independent factors (P_1 x ... x P_k).
struct ProductDistribution {
  std::vector<Distribution> factors;
};

absl::StatusOr<ProductDistribution> MakeProduct(
    std::vector<Distribution> factors);

// Density for continuous laws; point mass for discrete laws (0 when `x` is
// not an outcome label).
double Pdf(const Distribution& d, double x);

// Natural log of Pdf, evaluated without forming the density itself so that
// far tails do not underflow. Returns -inf where the density is zero.
double LogPdf(const Distribution& d, double x);

// Cumulative distribution function and survival function 1 - cdf; the
// survival function is computed directly for accuracy in the upper tail.
// Discrete laws yield kInvalidArgument (unsupported variant).
absl::StatusOr<double> Cdf(const Distribution& d, double x);
absl::StatusOr<double> Sf(const Distribution& d, double x);

// Probability of the open interval (a, b) for a continuous law, using
// whichever of the cdf/sf forms avoids cancellation. Precondition: continuous.
double IntervalMass(const Distribution& d, double a, double b);

// ln(dP/dQ)(x). +inf where q has zero density and p does not, -inf in the
// symmetric case, 0 where both vanish.
absl::StatusOr<double> LogDensityRatio(const Distribution& p,
                                       const Distribution& q, double x);

// Seedable generator type used throughout the library.
using Rng = std::mt19937_64;

double Sample(const Distribution& d, Rng& rng);

// Smallest and largest of (location -/+ width * scale) over all continuous
// components.
std::pair<double, double> SupportWindow(const Distribution& d, double width);

}  // namespace dpacct

#endif  // DPACCT_DISTRIBUTION_H_
