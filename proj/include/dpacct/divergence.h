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

// Hockey-stick divergence H_alpha(P || Q) = E_Q[max(dP/dQ - alpha, 0)].
//
// Continuous pairs are handled through the privacy loss L(x) = ln p(x)/q(x):
// the positive part of p - alpha q is exactly the super-level set
// {L > ln alpha}, so H_alpha = P(L > ln alpha) - alpha Q(L > ln alpha) and
// both masses are sums of cdf differences over the level-set intervals.
// Discrete pairs are evaluated exactly over rationals.

#ifndef DPACCT_DIVERGENCE_H_
#define DPACCT_DIVERGENCE_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpacct/distribution.h"
#include "dpacct/rational.h"

namespace dpacct {

inline constexpr double kDefaultDivergenceTolerance = 1e-12;
inline constexpr int64_t kDefaultEnumerationBudget = 10'000'000;
inline constexpr int kMaxCrossings = 1000;

struct Interval {
  double lo;
  double hi;
};

// Probability mass that a pair of laws assigns to the same event.
struct PairMass {
  double p = 0;
  double q = 0;
};

// Level-set view of the privacy loss L(x) = ln p(x) - ln q(x) of a pair of
// continuous laws. Construction scans an integration window (20 scale units
// beyond the extreme component locations, widened for heavy tails so that
// the mass outside is below `tol`) and splits it into pieces on which L is
// monotone; level sets are then located per piece by bisection.
class PrivacyLoss {
 public:
  static absl::StatusOr<PrivacyLoss> Create(
      const Distribution& p, const Distribution& q,
      double tol = kDefaultDivergenceTolerance);

  double Loss(double x) const;

  // {x : L(x) > level} as sorted disjoint open intervals (ends may be +-inf).
  std::vector<Interval> SuperLevelSet(double level) const;
  // {x : L(x) < level}.
  std::vector<Interval> SubLevelSet(double level) const;

  // P- and Q-mass of {L > level}.
  PairMass UpperTail(double level) const;
  // P- and Q-mass of {L < level}.
  PairMass LowerTail(double level) const;

  // H_alpha(P || Q), clipped into [0, 1].
  double HockeyStick(double alpha) const;
  // H_{e^eps}(P || Q) evaluated without forming e^eps for the level.
  double DeltaForEpsilon(double epsilon) const;

  // Range of L over the scan window.
  double MinLoss() const { return min_loss_; }
  double MaxLoss() const { return max_loss_; }

  Interval window() const { return window_; }
  // Analytic bound on the P- plus Q-mass outside the scan window.
  double window_tail_mass() const { return window_tail_mass_; }
  int num_pieces() const { return static_cast<int>(pieces_.size()); }

  const Distribution& p() const { return p_; }
  const Distribution& q() const { return q_; }

 private:
  struct Piece {
    double lo;  // may be -inf
    double hi;  // may be +inf
    bool increasing;
  };

  PrivacyLoss(Distribution p, Distribution q) : p_(std::move(p)), q_(std::move(q)) {}

  // Level set {L > level} (want_high) or {L < level}.
  std::vector<Interval> LevelSet(double level, bool want_high) const;
  PairMass MassOf(const std::vector<Interval>& set) const;

  Distribution p_;
  Distribution q_;
  Interval window_{0, 0};
  double window_tail_mass_ = 0;
  double min_loss_ = 0;
  double max_loss_ = 0;
  std::vector<Piece> pieces_;
};

// H_alpha(P || Q) for continuous P, Q, accurate to `tol` (absolute). Falls
// back to adaptive quadrature when the level-set scan cannot be built.
// Errors: kInvalidArgument for discrete inputs or alpha < 0;
// kDeadlineExceeded (no convergence) if the error cannot be brought under tol.
absl::StatusOr<double> HockeyStick(const Distribution& p, const Distribution& q,
                                   double alpha,
                                   double tol = kDefaultDivergenceTolerance);

// Same quantity by adaptive Gauss-Kronrod quadrature of max(p - alpha q, 0),
// split at component locations and at the roots of p - alpha q.
absl::StatusOr<double> HockeyStickQuadrature(
    const Distribution& p, const Distribution& q, double alpha,
    double tol = kDefaultDivergenceTolerance);

// Exact sum over outcomes of max(p_i - alpha q_i, 0). Both laws must be
// discrete over the same label set (kInvalidArgument: label mismatch).
absl::StatusOr<Rational> HockeyStickDiscrete(const Distribution& p,
                                             const Distribution& q,
                                             const Rational& alpha);

// Brute-force divergence of product laws over all outcome tuples.
// kResourceExhausted when the tuple count exceeds `budget`.
absl::StatusOr<Rational> HockeyStickProduct(
    const ProductDistribution& ps, const ProductDistribution& qs,
    const Rational& alpha, int64_t budget = kDefaultEnumerationBudget);

// Sorted roots of p(y) - alpha q(y) inside the scan window. The sign of
// p - alpha q is constant between consecutive roots. kResourceExhausted when
// more than kMaxCrossings roots are found.
absl::StatusOr<std::vector<double>> CrossingPoints(const Distribution& p,
                                                   const Distribution& q,
                                                   double alpha);

// Image of a discrete law under a deterministic relabeling map; outcomes that
// map to the same label are merged.
absl::StatusOr<Distribution> PushForward(
    const Distribution& d, const std::vector<double>& new_labels);

}  // namespace dpacct

#endif  // DPACCT_DIVERGENCE_H_
