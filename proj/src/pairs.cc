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

#include "dpacct/pairs.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "dpacct/divergence.h"
#include "dpacct/kernels.h"

namespace dpacct {
namespace {

// (1 - gamma) Noise(0) + gamma Noise(shift), collapsing the degenerate
// endpoints to a single component.
Distribution SubsampledNoise(const MechanismSpec& mech, double gamma,
                             double shift) {
  if (gamma <= 0) return mech.Noise(0);
  if (gamma >= 1) return mech.Noise(shift);
  return *Distribution::Mixture({1 - gamma, gamma},
                                {mech.Noise(0), mech.Noise(shift)});
}

double SensitivityShift(const SamplingScheme& scheme) {
  return scheme.kind == SchemeKind::kPoisson ? 1.0 : 2.0;
}

absl::StatusOr<PrivacyCurve> CurveFromLosses(
    const std::vector<const PrivacyLoss*>& losses,
    std::span<const double> eps_grid) {
  if (absl::Status s = CheckStrictlyIncreasing(eps_grid); !s.ok()) return s;
  std::vector<double> deltas =
      kernels::MapGrid(eps_grid, [&losses](double eps) {
        double best = 0;
        for (const PrivacyLoss* loss : losses) {
          best = std::max(best, loss->DeltaForEpsilon(eps));
        }
        return best;
      });
  PrivacyCurve curve;
  curve.points.reserve(eps_grid.size());
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    curve.points.push_back({eps_grid[i], deltas[i]});
  }
  return curve;
}

}  // namespace

DominatingPair PairAdd(const MechanismSpec& mech,
                       const SamplingScheme& scheme) {
  return DominatingPair{
      .p = mech.Noise(0),
      .q = SubsampledNoise(mech, scheme.gamma, SensitivityShift(scheme)),
      .relation = Relation::kAdd,
      .scheme = scheme,
      .tight = true,
      .direction_note = "add: (Noise(0), (1-g)Noise(0) + g Noise(shift))"};
}

DominatingPair PairRemove(const MechanismSpec& mech,
                          const SamplingScheme& scheme) {
  DominatingPair pair = PairAdd(mech, scheme);
  std::swap(pair.p, pair.q);
  pair.relation = Relation::kRemove;
  pair.direction_note = "remove: ((1-g)Noise(0) + g Noise(shift), Noise(0))";
  return pair;
}

absl::StatusOr<DominatingPair> PairSubstitutionPoisson(
    const MechanismSpec& mech, double gamma) {
  if (mech.noise != NoiseKind::kGaussian) {
    return absl::InvalidArgumentError(
        "unsupported noise: the Poisson substitution pair is only "
        "established for Gaussian noise");
  }
  absl::StatusOr<SamplingScheme> scheme = SamplingScheme::Poisson(gamma);
  if (!scheme.ok()) return scheme.status();
  return DominatingPair{
      .p = SubsampledNoise(mech, gamma, 1.0),
      .q = SubsampledNoise(mech, gamma, -1.0),
      .relation = Relation::kSubstitution,
      .scheme = *scheme,
      .tight = true,
      .direction_note = "substitution: datasets (0,...,0,1) vs (0,...,0,-1)"};
}

SubstitutionWorBounds PairSubstitutionWorBounds(const MechanismSpec& mech,
                                                double gamma) {
  const SamplingScheme scheme{SchemeKind::kWor, gamma};
  Distribution base = mech.Noise(0);
  Distribution mixed = SubsampledNoise(mech, gamma, 2.0);
  return SubstitutionWorBounds{
      .alpha_ge_1 = {.p = mixed,
                     .q = base,
                     .relation = Relation::kSubstitution,
                     .scheme = scheme,
                     .tight = false,
                     .direction_note = "substitution WOR bound for alpha >= 1"},
      .alpha_lt_1 = {.p = base,
                     .q = mixed,
                     .relation = Relation::kSubstitution,
                     .scheme = scheme,
                     .tight = false,
                     .direction_note = "substitution WOR bound for alpha < 1"},
  };
}

absl::StatusOr<PrivacyCurve> CombinedSubstitutionCurve(
    const MechanismSpec& mech, double gamma, std::span<const double> eps_grid) {
  const SubstitutionWorBounds bounds = PairSubstitutionWorBounds(mech, gamma);
  absl::StatusOr<PrivacyLoss> upper =
      PrivacyLoss::Create(bounds.alpha_ge_1.p, bounds.alpha_ge_1.q);
  if (!upper.ok()) return upper.status();
  absl::StatusOr<PrivacyLoss> lower =
      PrivacyLoss::Create(bounds.alpha_lt_1.p, bounds.alpha_lt_1.q);
  if (!lower.ok()) return lower.status();
  absl::StatusOr<PrivacyCurve> curve =
      CurveFromLosses({&*upper, &*lower}, eps_grid);
  if (!curve.ok()) return curve;
  curve->relation = Relation::kSubstitution;
  curve->scheme = bounds.alpha_ge_1.scheme;
  curve->tight = false;
  curve->direction = "combined";
  return curve;
}

absl::StatusOr<PrivacyCurve> PairCurve(const DominatingPair& pair,
                                       std::span<const double> eps_grid) {
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(pair.p, pair.q);
  if (!loss.ok()) return loss.status();
  absl::StatusOr<PrivacyCurve> curve = CurveFromLosses({&*loss}, eps_grid);
  if (!curve.ok()) return curve;
  curve->relation = pair.relation;
  curve->scheme = pair.scheme;
  curve->tight = pair.tight;
  curve->direction = std::string(RelationName(pair.relation));
  return curve;
}

}  // namespace dpacct
