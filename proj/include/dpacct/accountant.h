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

// End-to-end accounting for k-fold composition of a subsampled mechanism.
//
// Add/remove accounting evaluates the add and remove directions separately
// and reports the maximum: no single pair of datasets realizes the add/remove
// curve of a composed subsampled mechanism, so taking one direction alone can
// under-report. Substitution under WOR is an upper bound that is not tight.

#ifndef DPACCT_ACCOUNTANT_H_
#define DPACCT_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpacct/mechanism.h"
#include "dpacct/pld.h"
#include "dpacct/privacy_curve.h"

namespace dpacct {

inline constexpr double kDefaultSigmaTolerance = 1e-3;
inline constexpr double kMinSigma = 1e-2;
inline constexpr double kMaxSigma = 1e3;

struct AccountantConfig {
  MechanismSpec mech;
  SamplingScheme scheme;
  Relation relation = Relation::kAddRemove;
  int64_t k = 1;
  double step = kDefaultStep;
  double tail_mass_bound = kDefaultTailMassBound;
  Discretization discretization = Discretization::kConnectTheDots;
};

absl::Status ValidateConfig(const AccountantConfig& cfg);

// One composed PLD per direction that enters the maximum.
struct DirectionalPld {
  std::string direction;  // "add", "remove", "substitution" or "combined"
  bool tight = true;
  DiscretePLD pld;
};

class Accountant {
 public:
  static absl::StatusOr<Accountant> Create(const AccountantConfig& cfg);

  // Max over directions. kOutOfRange if delta is unreachable in some
  // direction.
  absl::StatusOr<double> EpsilonFor(double delta) const;
  double DeltaFor(double eps) const;

  // Per-direction answers, in the order of directions().
  absl::StatusOr<std::vector<double>> EpsilonByDirection(double delta) const;
  std::vector<double> DeltaByDirection(double eps) const;

  const std::vector<DirectionalPld>& directions() const { return directions_; }
  const AccountantConfig& config() const { return cfg_; }
  bool tight() const;

 private:
  Accountant(AccountantConfig cfg, std::vector<DirectionalPld> directions)
      : cfg_(std::move(cfg)), directions_(std::move(directions)) {}

  AccountantConfig cfg_;
  std::vector<DirectionalPld> directions_;
};

absl::StatusOr<double> EpsilonFor(const AccountantConfig& cfg, double delta);
absl::StatusOr<double> DeltaFor(const AccountantConfig& cfg, double eps);

// Single-iteration combined WOR substitution curve sampled on the lattice
// covering the loss range of both direction pairs.
absl::StatusOr<PrivacyCurve> SubstitutionWorLatticeCurve(
    const MechanismSpec& mech, double gamma, double step,
    double tail_mass_bound);

// Connect-the-dots PLD of SubstitutionWorLatticeCurve.
absl::StatusOr<DiscretePLD> SubstitutionWorPld(const MechanismSpec& mech,
                                               double gamma, double step,
                                               double tail_mass_bound);

struct SigmaOptions {
  double relative_tolerance = kDefaultSigmaTolerance;
  double min_sigma = kMinSigma;
  double max_sigma = kMaxSigma;
};

// Smallest noise parameter reaching (epsilon, delta), by bisection on the
// mechanism parameter of `cfg` (its value is ignored). Returns the upper
// bisection endpoint. Configurations whose lattice overflows or whose delta
// is unreachable count as failing the target. kOutOfRange when the answer
// lies outside [min_sigma, max_sigma].
absl::StatusOr<double> SigmaFor(const AccountantConfig& cfg, double epsilon,
                                double delta, const SigmaOptions& options = {});

struct Figure2Row {
  SchemeKind scheme;
  double epsilon;
  double gamma;
  double sigma;
};

struct Figure2Options {
  std::vector<double> gammas;
  std::vector<double> poisson_eps = {1, 2, 5, 10};
  std::vector<double> wor_eps = {10};
  double delta = 1e-6;
  int64_t k = 10000;
  double step = kDefaultStep;
  double tail_mass_bound = kDefaultTailMassBound;
  SigmaOptions sigma;
};

// Default sampling-rate grid of the sweep: 10^-4 .. 1, two points per decade.
std::vector<double> DefaultFigure2Gammas();

// Rows ordered by (scheme, epsilon, gamma); cells run in parallel.
absl::StatusOr<std::vector<Figure2Row>> SweepFigure2(
    const Figure2Options& options);

}  // namespace dpacct

#endif  // DPACCT_ACCOUNTANT_H_
