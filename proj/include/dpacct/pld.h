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

// Discretized privacy loss distributions on a uniform loss lattice.
//
// A DiscretePLD puts mass masses[i] on loss_start + i * step and mass_inf on
// +infinity. Its privacy curve is
//
//   delta(eps) = sum_{loss_i > eps} masses[i] (1 - e^{eps - loss_i}) + mass_inf
//
// Composition of mechanisms is convolution of their PLDs.

#ifndef DPACCT_PLD_H_
#define DPACCT_PLD_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpacct/distribution.h"
#include "dpacct/kernels.h"

namespace dpacct {

inline constexpr double kDefaultStep = 1e-4;
inline constexpr double kDefaultTailMassBound = 1e-15;
inline constexpr int64_t kDefaultMaxPoints = int64_t{1} << 24;

enum class Discretization {
  // Loss buckets rounded up to the lattice (pld_from_pair).
  kBucket,
  // Lattice atoms interpolating the exact single-step curve.
  kConnectTheDots,
};

std::string_view DiscretizationName(Discretization d);
absl::StatusOr<Discretization> ParseDiscretization(std::string_view text);

struct DiscretePLD {
  double loss_start = 0;
  double step = kDefaultStep;
  std::vector<double> masses;
  double mass_inf = 0;
  bool pessimistic = true;

  double LossAt(int64_t i) const { return loss_start + i * step; }
  double loss_end() const { return LossAt(size() - 1); }
  int64_t size() const { return static_cast<int64_t>(masses.size()); }
  double TotalMass() const;
  kernels::LatticeView View() const {
    return {loss_start, step, masses, mass_inf};
  }
};

// Masses nonnegative and finite, total within 1e-9 of 1, step > 0.
absl::Status ValidatePld(const DiscretePLD& pld);

// All mass on loss 0: the identity of Compose.
DiscretePLD PointMassPld(double step = kDefaultStep);

// Pessimistic bucket discretization of L = ln(p/q)(X), X ~ p. The P-mass of
// (l - step, l] goes to lattice point l, mass above the top point to
// mass_inf and mass below the bottom point to the bottom point. The lattice
// covers all but `tail_mass_bound` of the loss on either side.
absl::StatusOr<DiscretePLD> PldFromPair(
    const Distribution& p, const Distribution& q, double step = kDefaultStep,
    double tail_mass_bound = kDefaultTailMassBound);

// Connect-the-dots: atoms on the (uniform) eps grid whose curve passes
// through every (eps_grid[j], deltas[j]), with mass_inf = deltas.back() and
// the remaining mass on the bottom atom. kFailedPrecondition for curves that
// are not convex in e^eps.
absl::StatusOr<DiscretePLD> PldFromDeltaCurve(std::span<const double> eps_grid,
                                              std::span<const double> deltas);

// Connect-the-dots applied to the exact single-step curve of (p, q) sampled
// on the lattice covering the loss range of PldFromPair.
absl::StatusOr<DiscretePLD> PldFromPairConnectTheDots(
    const Distribution& p, const Distribution& q, double step = kDefaultStep,
    double tail_mass_bound = kDefaultTailMassBound);

// Lattice-aligned [lo, hi] (multiples of step) holding all but
// tail_mass_bound of the P-law of the loss on each side.
absl::StatusOr<std::pair<double, double>> LossRange(const Distribution& p,
                                                    const Distribution& q,
                                                    double step,
                                                    double tail_mass_bound);

absl::StatusOr<DiscretePLD> PldForPair(const Distribution& p,
                                       const Distribution& q,
                                       Discretization discretization,
                                       double step, double tail_mass_bound);

double DeltaOf(const DiscretePLD& pld, double eps);
std::vector<double> DeltaOf(const DiscretePLD& pld,
                            std::span<const double> eps);

// Smallest lattice loss eps with DeltaOf(pld, eps) <= delta. Below the bottom
// atom the curve is solved in closed form and rounded up to the lattice.
// Returns -inf when delta reaches the total mass; kOutOfRange when
// delta <= mass_inf.
absl::StatusOr<double> EpsilonOf(const DiscretePLD& pld, double delta);

struct CompositionOptions {
  // Mass trimmed per composition, split between the two tails. Upper-tail
  // mass moves to mass_inf, lower-tail mass to the new bottom atom.
  double tail_mass_bound = kDefaultTailMassBound;
  int64_t max_points = kDefaultMaxPoints;
};

absl::StatusOr<DiscretePLD> Compose(const DiscretePLD& a,
                                    const DiscretePLD& b,
                                    const CompositionOptions& options = {});

// k-fold composition by repeated squaring.
absl::StatusOr<DiscretePLD> SelfCompose(const DiscretePLD& pld, int64_t k,
                                        const CompositionOptions& options = {});

// {"loss_start", "step", "masses", "mass_inf", "pessimistic"}.
std::string PldToJson(const DiscretePLD& pld);
absl::StatusOr<DiscretePLD> PldFromJson(std::string_view json);

}  // namespace dpacct

#endif  // DPACCT_PLD_H_
