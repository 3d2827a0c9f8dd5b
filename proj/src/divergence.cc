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

#include "dpacct/divergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "boost/math/quadrature/gauss_kronrod.hpp"

namespace dpacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScanNodes = 4096;
constexpr int kMaxPieces = 1000;
constexpr int kMaxExpansions = 60;

// Window half-width, in scale units, so that one component leaves less than
// `tol` outside.
double WindowWidth(const Distribution& component, double tol) {
  if (std::holds_alternative<LaplaceLaw>(component.law())) {
    return std::max(20.0, std::log(4.0 / tol) + 2.0);
  }
  return std::max(20.0, std::sqrt(2.0 * std::log(4.0 / tol)) + 2.0);
}

void AtomicComponents(const Distribution& d, std::vector<Distribution>& out) {
  if (const auto* m = std::get_if<MixtureLaw>(&d.law())) {
    for (const Distribution& c : m->components) out.push_back(c);
  } else {
    out.push_back(d);
  }
}

// Bisects for the boundary between a false and a true value of a monotone
// predicate; `false_x` and `true_x` may be in either order.
template <typename Pred>
double Bisect(Pred pred, double false_x, double true_x) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (false_x + true_x);
    if (std::abs(true_x - false_x) <=
            1e-13 * std::max(1.0, std::abs(mid)) ||
        mid == false_x || mid == true_x) {
      break;
    }
    if (pred(mid)) {
      true_x = mid;
    } else {
      false_x = mid;
    }
  }
  return 0.5 * (false_x + true_x);
}

// Location of the extremum of a unimodal function on [a, b].
template <typename Fn>
double GoldenSection(Fn f, double a, double b, bool maximize) {
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  auto better = [&](double x, double y) {
    return maximize ? f(x) > f(y) : f(x) < f(y);
  };
  for (int i = 0; i < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a));
       ++i) {
    if (better(c, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

absl::StatusOr<PrivacyLoss> PrivacyLoss::Create(const Distribution& p,
                                                const Distribution& q,
                                                double tol) {
  if (!p.IsContinuous() || !q.IsContinuous()) {
    return absl::InvalidArgumentError(
        "privacy loss level sets need continuous laws");
  }
  if (!(tol > 0)) {
    return absl::InvalidArgumentError("tolerance must be > 0");
  }
  PrivacyLoss loss(p, q);

  std::vector<Distribution> atoms;
  AtomicComponents(p, atoms);
  AtomicComponents(q, atoms);
  double lo = kInf;
  double hi = -kInf;
  std::vector<double> kinks;
  for (const Distribution& a : atoms) {
    const auto [loc, scale] = a.LocationScales().front();
    const double w = WindowWidth(a, tol);
    lo = std::min(lo, loc - w * scale);
    hi = std::max(hi, loc + w * scale);
    kinks.push_back(loc);
  }
  loss.window_ = {lo, hi};
  loss.window_tail_mass_ = (1.0 - IntervalMass(p, lo, hi)) +
                           (1.0 - IntervalMass(q, lo, hi));
  loss.window_tail_mass_ = std::max(0.0, loss.window_tail_mass_);

  std::vector<double> nodes;
  nodes.reserve(kScanNodes + kinks.size());
  for (int i = 0; i < kScanNodes; ++i) {
    nodes.push_back(lo + (hi - lo) * i / (kScanNodes - 1));
  }
  nodes.insert(nodes.end(), kinks.begin(), kinks.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<double> values(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) values[i] = loss.Loss(nodes[i]);
  loss.min_loss_ = *std::min_element(values.begin(), values.end());
  loss.max_loss_ = *std::max_element(values.begin(), values.end());

  auto trend_of = [&](size_t i) {
    const double diff = values[i + 1] - values[i];
    const double noise =
        1e-14 * (std::abs(values[i]) + std::abs(values[i + 1])) + 1e-300;
    if (std::abs(diff) <= noise) return 0;
    return diff > 0 ? 1 : -1;
  };

  auto f = [&loss](double x) { return loss.Loss(x); };
  double piece_start = -kInf;
  int trend = 0;
  size_t run_start = 0;  // first node of the current nonzero-trend run
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const int t = trend_of(i);
    if (t == 0) continue;
    if (trend == 0) {
      trend = t;
      run_start = i;
      continue;
    }
    if (t != trend) {
      const double split =
          GoldenSection(f, nodes[run_start], nodes[i + 1], trend > 0);
      loss.pieces_.push_back({piece_start, split, trend > 0});
      if (loss.pieces_.size() > static_cast<size_t>(kMaxPieces)) {
        return absl::ResourceExhaustedError(
            "privacy loss has too many monotone pieces");
      }
      piece_start = split;
      trend = t;
    }
    run_start = i;
  }
  loss.pieces_.push_back({piece_start, kInf, trend >= 0});
  return loss;
}

double PrivacyLoss::Loss(double x) const {
  return LogPdf(p_, x) - LogPdf(q_, x);
}

std::vector<Interval> PrivacyLoss::LevelSet(double level,
                                            bool want_high) const {
  auto pred = [&](double x) {
    const double l = Loss(x);
    return want_high ? l > level : l < level;
  };
  const double width = window_.hi - window_.lo;
  std::vector<Interval> out;
  auto emit = [&out](double a, double b) {
    if (!(a < b)) return;
    if (!out.empty() && out.back().hi == a) {
      out.back().hi = b;
    } else {
      out.push_back({a, b});
    }
  };

  for (const Piece& piece : pieces_) {
    // Within the piece the predicate holds on a suffix (true_on_right) or a
    // prefix of it.
    const bool true_on_right = piece.increasing == want_high;
    const double a = std::isfinite(piece.lo) ? piece.lo : window_.lo;
    const double b = std::isfinite(piece.hi) ? piece.hi : window_.hi;
    const bool pa = pred(a);
    const bool pb = pred(b);
    if (true_on_right) {
      if (pa) {
        // True from the left end; if the left end is open, look further out
        // for where it turns false.
        double start = piece.lo;
        if (!std::isfinite(piece.lo)) {
          double false_x = kInf;
          for (int j = 0; j < kMaxExpansions; ++j) {
            const double x = window_.lo - width * std::ldexp(1.0, j);
            if (!pred(x)) {
              false_x = x;
              break;
            }
          }
          start = std::isfinite(false_x) ? Bisect(pred, false_x, a) : -kInf;
        }
        emit(start, piece.hi);
      } else if (pb) {
        emit(Bisect(pred, a, b), piece.hi);
      } else if (!std::isfinite(piece.hi)) {
        for (int j = 0; j < kMaxExpansions; ++j) {
          const double x = window_.hi + width * std::ldexp(1.0, j);
          if (pred(x)) {
            emit(Bisect(pred, b, x), piece.hi);
            break;
          }
        }
      }
    } else {
      if (pb) {
        double end = piece.hi;
        if (!std::isfinite(piece.hi)) {
          double false_x = kInf;
          for (int j = 0; j < kMaxExpansions; ++j) {
            const double x = window_.hi + width * std::ldexp(1.0, j);
            if (!pred(x)) {
              false_x = x;
              break;
            }
          }
          end = std::isfinite(false_x) ? Bisect(pred, false_x, b) : kInf;
        }
        emit(piece.lo, end);
      } else if (pa) {
        emit(piece.lo, Bisect(pred, b, a));
      } else if (!std::isfinite(piece.lo)) {
        for (int j = 0; j < kMaxExpansions; ++j) {
          const double x = window_.lo - width * std::ldexp(1.0, j);
          if (pred(x)) {
            emit(piece.lo, Bisect(pred, a, x));
            break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<Interval> PrivacyLoss::SuperLevelSet(double level) const {
  return LevelSet(level, /*want_high=*/true);
}

std::vector<Interval> PrivacyLoss::SubLevelSet(double level) const {
  return LevelSet(level, /*want_high=*/false);
}

PairMass PrivacyLoss::MassOf(const std::vector<Interval>& set) const {
  PairMass mass;
  for (const Interval& iv : set) {
    mass.p += IntervalMass(p_, iv.lo, iv.hi);
    mass.q += IntervalMass(q_, iv.lo, iv.hi);
  }
  mass.p = std::min(mass.p, 1.0);
  mass.q = std::min(mass.q, 1.0);
  return mass;
}

PairMass PrivacyLoss::UpperTail(double level) const {
  if (level == -kInf) return {1.0, 1.0};
  if (level == kInf) return {0.0, 0.0};
  return MassOf(SuperLevelSet(level));
}

PairMass PrivacyLoss::LowerTail(double level) const {
  if (level == -kInf) return {0.0, 0.0};
  if (level == kInf) return {1.0, 1.0};
  return MassOf(SubLevelSet(level));
}

double PrivacyLoss::DeltaForEpsilon(double epsilon) const {
  if (epsilon == -kInf) return 1.0;
  const PairMass tail = UpperTail(epsilon);
  if (tail.p == 0) return 0.0;
  const double delta = tail.p - std::exp(epsilon) * tail.q;
  return std::clamp(delta, 0.0, 1.0);
}

double PrivacyLoss::HockeyStick(double alpha) const {
  if (alpha <= 0) return 1.0;
  return DeltaForEpsilon(std::log(alpha));
}

absl::StatusOr<double> HockeyStick(const Distribution& p, const Distribution& q,
                                   double alpha, double tol) {
  if (!p.IsContinuous() || !q.IsContinuous()) {
    return absl::InvalidArgumentError(
        "hockey_stick needs continuous laws; use HockeyStickDiscrete");
  }
  if (!(alpha >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("hockey_stick needs alpha >= 0, got ", alpha));
  }
  if (!(tol > 0)) return absl::InvalidArgumentError("tolerance must be > 0");
  if (alpha == 0) return 1.0;
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(p, q, tol);
  if (!loss.ok()) {
    if (loss.status().code() == absl::StatusCode::kResourceExhausted) {
      return HockeyStickQuadrature(p, q, alpha, tol);
    }
    return loss.status();
  }
  if (loss->window_tail_mass() > tol) {
    return absl::DeadlineExceededError(absl::StrFormat(
        "hockey_stick did not converge: window tail mass %g exceeds tol %g",
        loss->window_tail_mass(), tol));
  }
  return loss->HockeyStick(alpha);
}

absl::StatusOr<double> HockeyStickQuadrature(const Distribution& p,
                                             const Distribution& q,
                                             double alpha, double tol) {
  if (!p.IsContinuous() || !q.IsContinuous()) {
    return absl::InvalidArgumentError("quadrature needs continuous laws");
  }
  if (!(alpha >= 0)) return absl::InvalidArgumentError("alpha must be >= 0");
  if (alpha == 0) return 1.0;

  std::vector<Distribution> atoms;
  AtomicComponents(p, atoms);
  AtomicComponents(q, atoms);
  std::vector<double> breaks;
  double lo = kInf;
  double hi = -kInf;
  for (const Distribution& a : atoms) {
    const auto [loc, scale] = a.LocationScales().front();
    const double w = WindowWidth(a, tol);
    lo = std::min(lo, loc - w * scale);
    hi = std::max(hi, loc + w * scale);
    breaks.push_back(loc);
  }
  breaks.push_back(lo);
  breaks.push_back(hi);
  absl::StatusOr<std::vector<double>> roots = CrossingPoints(p, q, alpha);
  if (roots.ok()) {
    for (double r : *roots) {
      if (r > lo && r < hi) breaks.push_back(r);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double x) {
    return std::max(0.0, Pdf(p, x) - alpha * Pdf(q, x));
  };
  double total = 0;
  double error = (1.0 - IntervalMass(p, lo, hi));
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double piece_error = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, breaks[i], breaks[i + 1], /*max_depth=*/15,
        /*tolerance=*/tol * 1e-2, &piece_error);
    error += piece_error;
  }
  if (error > tol) {
    return absl::DeadlineExceededError(absl::StrFormat(
        "quadrature did not converge: error estimate %g > tol %g", error,
        tol));
  }
  return std::clamp(total, 0.0, 1.0);
}

namespace {

// Probabilities of `q` reordered to follow the outcome order of `p`.
absl::StatusOr<std::vector<Rational>> AlignedProbs(const DiscreteLaw& p,
                                                   const DiscreteLaw& q) {
  if (p.outcomes.size() != q.outcomes.size()) {
    return absl::InvalidArgumentError("label mismatch: different label counts");
  }
  std::map<double, size_t> index;
  for (size_t i = 0; i < q.outcomes.size(); ++i) index[q.outcomes[i]] = i;
  std::vector<Rational> aligned;
  aligned.reserve(p.outcomes.size());
  for (double label : p.outcomes) {
    auto it = index.find(label);
    if (it == index.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("label mismatch: ", label, " missing from second law"));
    }
    aligned.push_back(q.probs[it->second]);
  }
  return aligned;
}

absl::StatusOr<const DiscreteLaw*> AsDiscrete(const Distribution& d) {
  const auto* law = std::get_if<DiscreteLaw>(&d.law());
  if (law == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected a discrete law, got ", d.DebugString()));
  }
  return law;
}

}  // namespace

absl::StatusOr<Rational> HockeyStickDiscrete(const Distribution& p,
                                             const Distribution& q,
                                             const Rational& alpha) {
  absl::StatusOr<const DiscreteLaw*> pl = AsDiscrete(p);
  if (!pl.ok()) return pl.status();
  absl::StatusOr<const DiscreteLaw*> ql = AsDiscrete(q);
  if (!ql.ok()) return ql.status();
  if (alpha.IsNegative()) {
    return absl::InvalidArgumentError("alpha must be >= 0");
  }
  absl::StatusOr<std::vector<Rational>> qs = AlignedProbs(**pl, **ql);
  if (!qs.ok()) return qs.status();
  Rational total(0);
  for (size_t i = 0; i < (*pl)->probs.size(); ++i) {
    const Rational diff = (*pl)->probs[i] - alpha * (*qs)[i];
    if (!diff.IsNegative()) total += diff;
  }
  return total;
}

absl::StatusOr<Rational> HockeyStickProduct(const ProductDistribution& ps,
                                            const ProductDistribution& qs,
                                            const Rational& alpha,
                                            int64_t budget) {
  if (ps.factors.size() != qs.factors.size() || ps.factors.empty()) {
    return absl::InvalidArgumentError("product factor counts differ");
  }
  if (alpha.IsNegative()) {
    return absl::InvalidArgumentError("alpha must be >= 0");
  }
  std::vector<std::vector<Rational>> p_probs;
  std::vector<std::vector<Rational>> q_probs;
  double tuples = 1;
  for (size_t f = 0; f < ps.factors.size(); ++f) {
    absl::StatusOr<const DiscreteLaw*> pl = AsDiscrete(ps.factors[f]);
    if (!pl.ok()) return pl.status();
    absl::StatusOr<const DiscreteLaw*> ql = AsDiscrete(qs.factors[f]);
    if (!ql.ok()) return ql.status();
    absl::StatusOr<std::vector<Rational>> aligned = AlignedProbs(**pl, **ql);
    if (!aligned.ok()) return aligned.status();
    p_probs.push_back((*pl)->probs);
    q_probs.push_back(*std::move(aligned));
    tuples *= static_cast<double>((*pl)->probs.size());
  }
  if (tuples > static_cast<double>(budget)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "enumeration budget exceeded: %g outcome tuples > %d", tuples,
        budget));
  }

  // Depth-first walk over outcome tuples carrying prefix products.
  Rational total(0);
  const size_t depth = p_probs.size();
  auto walk = [&](auto& self, size_t level, const Rational& p_prefix,
                  const Rational& q_prefix) -> void {
    if (level == depth) {
      const Rational diff = p_prefix - alpha * q_prefix;
      if (!diff.IsNegative()) total += diff;
      return;
    }
    for (size_t i = 0; i < p_probs[level].size(); ++i) {
      self(self, level + 1, p_prefix * p_probs[level][i],
           q_prefix * q_probs[level][i]);
    }
  };
  walk(walk, 0, Rational(1), Rational(1));
  return total;
}

absl::StatusOr<std::vector<double>> CrossingPoints(const Distribution& p,
                                                   const Distribution& q,
                                                   double alpha) {
  if (!(alpha >= 0)) return absl::InvalidArgumentError("alpha must be >= 0");
  if (alpha == 0) return std::vector<double>{};
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(p, q);
  if (!loss.ok()) return loss.status();
  const double level = std::log(alpha);
  std::vector<double> roots;
  for (const auto& set : {loss->SuperLevelSet(level), loss->SubLevelSet(level)}) {
    for (const Interval& iv : set) {
      for (double x : {iv.lo, iv.hi}) {
        if (std::isfinite(x) && x > loss->window().lo &&
            x < loss->window().hi) {
          roots.push_back(x);
        }
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() ||
        r - unique.back() > 1e-12 * std::max(1.0, std::abs(r))) {
      unique.push_back(r);
    }
  }
  if (unique.size() > static_cast<size_t>(kMaxCrossings)) {
    return absl::ResourceExhaustedError("root budget exceeded");
  }
  return unique;
}

absl::StatusOr<Distribution> PushForward(const Distribution& d,
                                         const std::vector<double>& new_labels) {
  absl::StatusOr<const DiscreteLaw*> law = AsDiscrete(d);
  if (!law.ok()) return law.status();
  if (new_labels.size() != (*law)->outcomes.size()) {
    return absl::InvalidArgumentError("one new label per outcome required");
  }
  std::map<double, Rational> merged;
  for (size_t i = 0; i < new_labels.size(); ++i) {
    merged[new_labels[i]] += (*law)->probs[i];
  }
  std::vector<double> outcomes;
  std::vector<Rational> probs;
  for (auto& [label, prob] : merged) {
    outcomes.push_back(label);
    probs.push_back(prob);
  }
  return Distribution::Discrete(std::move(outcomes), std::move(probs));
}

}  // namespace dpacct
