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

// Dominating pairs (P, Q) for subsampled additive-noise sum queries over
// records in [-1, 1]: H_alpha(P || Q) bounds H_alpha(M(D) || M(D')) for all
// neighbors and all alpha >= 0, so (P^k, Q^k) bounds k-fold composition.
//
// Every pair is centered so that the pure-noise component sits at 0. For WOR
// the realizing datasets put the batch sum at -b; translating both laws by
// +b leaves every hockey-stick divergence unchanged.

#ifndef DPACCT_PAIRS_H_
#define DPACCT_PAIRS_H_

#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "dpacct/distribution.h"
#include "dpacct/mechanism.h"
#include "dpacct/privacy_curve.h"

namespace dpacct {

struct DominatingPair {
  Distribution p;
  Distribution q;
  Relation relation;
  SamplingScheme scheme;
  // True only for pairs realized by actual neighboring datasets.
  bool tight = false;
  std::string direction_note;
};

// Add relation. Poisson: (N(0), (1-g) N(0) + g N(1)); WOR: the shifted
// component sits at 2, since a sampled record swaps -1 for +1 in the batch.
DominatingPair PairAdd(const MechanismSpec& mech, const SamplingScheme& scheme);

// Remove relation: PairAdd with the two laws swapped.
DominatingPair PairRemove(const MechanismSpec& mech,
                          const SamplingScheme& scheme);

// Substitution under Poisson sampling, Gaussian noise only:
// ((1-g) N(0) + g N(1), (1-g) N(0) + g N(-1)). Laplace noise is rejected
// with kInvalidArgument (unsupported noise).
absl::StatusOr<DominatingPair> PairSubstitutionPoisson(
    const MechanismSpec& mech, double gamma);

// Direction-specific bounds for substitution under WOR, built from the base
// pair (Noise(0), Noise(2)). Neither is a dominating pair under composition.
struct SubstitutionWorBounds {
  DominatingPair alpha_ge_1;  // ((1-g) Noise(0) + g Noise(2), Noise(0))
  DominatingPair alpha_lt_1;  // (Noise(0), (1-g) Noise(0) + g Noise(2))
};
SubstitutionWorBounds PairSubstitutionWorBounds(const MechanismSpec& mech,
                                                double gamma);

// Single-iteration curve max(H_{e^eps}(alpha_ge_1), H_{e^eps}(alpha_lt_1)) on
// `eps_grid`. For eps >= 0 this is the alpha >= 1 branch and for eps < 0 the
// alpha < 1 branch. kInvalidArgument if the grid is not strictly increasing.
absl::StatusOr<PrivacyCurve> CombinedSubstitutionCurve(
    const MechanismSpec& mech, double gamma, std::span<const double> eps_grid);

// Single-iteration curve H_{e^eps}(P || Q) of one pair on `eps_grid`.
absl::StatusOr<PrivacyCurve> PairCurve(const DominatingPair& pair,
                                       std::span<const double> eps_grid);

}  // namespace dpacct

#endif  // DPACCT_PAIRS_H_
