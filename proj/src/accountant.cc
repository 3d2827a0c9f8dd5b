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

#include "dpacct/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpacct/kernels.h"
#include "dpacct/pairs.h"

namespace dpacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::StatusOr<DirectionalPld> ComposedDirection(
    const AccountantConfig& cfg, std::string direction, bool tight,
    absl::StatusOr<DiscretePLD> single) {
  if (!single.ok()) return single.status();
  CompositionOptions options;
  options.tail_mass_bound = cfg.tail_mass_bound;
  absl::StatusOr<DiscretePLD> composed = SelfCompose(*single, cfg.k, options);
  if (!composed.ok()) return composed.status();
  return DirectionalPld{std::move(direction), tight, *std::move(composed)};
}

absl::StatusOr<DirectionalPld> PairDirection(const AccountantConfig& cfg,
                                             const DominatingPair& pair,
                                             std::string direction) {
  return ComposedDirection(
      cfg, std::move(direction), pair.tight,
      PldForPair(pair.p, pair.q, cfg.discretization, cfg.step,
                 cfg.tail_mass_bound));
}

// A target is met when the computed epsilon is at most `epsilon`. Lattice
// overflow and unreachable delta count as not met.
absl::StatusOr<bool> MeetsTarget(const AccountantConfig& cfg, double sigma,
                                 double epsilon, double delta) {
  AccountantConfig at = cfg;
  at.mech = cfg.mech.WithParameter(sigma);
  absl::StatusOr<double> eps = EpsilonFor(at, delta);
  if (!eps.ok()) {
    if (absl::IsResourceExhausted(eps.status()) ||
        absl::IsOutOfRange(eps.status())) {
      return false;
    }
    return eps.status();
  }
  return *eps <= epsilon;
}

}  // namespace

absl::Status ValidateConfig(const AccountantConfig& cfg) {
  if (!(cfg.mech.parameter > 0) || !std::isfinite(cfg.mech.parameter)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "noise parameter must be positive and finite, got %g",
        cfg.mech.parameter));
  }
  if (!(cfg.scheme.gamma >= 0 && cfg.scheme.gamma <= 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sampling rate must lie in [0, 1], got %g", cfg.scheme.gamma));
  }
  if (cfg.k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("composition count must be >= 1, got %d", cfg.k));
  }
  if (!(cfg.step > 0) || !std::isfinite(cfg.step)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step must be positive, got %g", cfg.step));
  }
  if (!(cfg.tail_mass_bound > 0 && cfg.tail_mass_bound < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "tail mass bound must lie in (0, 1), got %g", cfg.tail_mass_bound));
  }
  if (cfg.relation == Relation::kSubstitution &&
      cfg.scheme.kind == SchemeKind::kPoisson &&
      cfg.mech.noise != NoiseKind::kGaussian) {
    return absl::InvalidArgumentError(
        "unsupported noise: Poisson substitution needs Gaussian noise");
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyCurve> SubstitutionWorLatticeCurve(
    const MechanismSpec& mech, double gamma, double step,
    double tail_mass_bound) {
  const SubstitutionWorBounds bounds = PairSubstitutionWorBounds(mech, gamma);
  double lo = kInf;
  double hi = -kInf;
  for (const DominatingPair* pair : {&bounds.alpha_ge_1, &bounds.alpha_lt_1}) {
    absl::StatusOr<std::pair<double, double>> range =
        LossRange(pair->p, pair->q, step, tail_mass_bound);
    if (!range.ok()) return range.status();
    lo = std::min(lo, range->first);
    hi = std::max(hi, range->second);
  }
  const int64_t lo_index = static_cast<int64_t>(std::llround(lo / step));
  const int64_t hi_index =
      std::max<int64_t>(lo_index + 1, std::llround(hi / step));
  const int64_t n = hi_index - lo_index + 1;
  if (n > kDefaultMaxPoints) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "overflow budget: substitution lattice needs %d points", n));
  }
  std::vector<double> grid(n);
  for (int64_t i = 0; i < n; ++i) grid[i] = (lo_index + i) * step;
  return CombinedSubstitutionCurve(mech, gamma, grid);
}

absl::StatusOr<DiscretePLD> SubstitutionWorPld(const MechanismSpec& mech,
                                               double gamma, double step,
                                               double tail_mass_bound) {
  absl::StatusOr<PrivacyCurve> curve =
      SubstitutionWorLatticeCurve(mech, gamma, step, tail_mass_bound);
  if (!curve.ok()) return curve.status();
  std::vector<double> grid;
  std::vector<double> deltas;
  for (const CurvePoint& pt : curve->points) {
    grid.push_back(pt.epsilon);
    deltas.push_back(pt.delta);
  }
  return PldFromDeltaCurve(grid, deltas);
}

absl::StatusOr<Accountant> Accountant::Create(const AccountantConfig& cfg) {
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;
  std::vector<DirectionalPld> directions;
  auto add = [&](absl::StatusOr<DirectionalPld> d) -> absl::Status {
    if (!d.ok()) return d.status();
    directions.push_back(*std::move(d));
    return absl::OkStatus();
  };

  absl::Status status;
  switch (cfg.relation) {
    case Relation::kAdd:
      status = add(PairDirection(cfg, PairAdd(cfg.mech, cfg.scheme), "add"));
      break;
    case Relation::kRemove:
      status = add(
          PairDirection(cfg, PairRemove(cfg.mech, cfg.scheme), "remove"));
      break;
    case Relation::kAddRemove:
      status = add(PairDirection(cfg, PairAdd(cfg.mech, cfg.scheme), "add"));
      if (status.ok()) {
        status = add(
            PairDirection(cfg, PairRemove(cfg.mech, cfg.scheme), "remove"));
      }
      break;
    case Relation::kSubstitution:
      if (cfg.scheme.kind == SchemeKind::kPoisson) {
        absl::StatusOr<DominatingPair> pair =
            PairSubstitutionPoisson(cfg.mech, cfg.scheme.gamma);
        if (!pair.ok()) return pair.status();
        status = add(PairDirection(cfg, *pair, "substitution"));
      } else {
        status = add(ComposedDirection(
            cfg, "combined", /*tight=*/false,
            SubstitutionWorPld(cfg.mech, cfg.scheme.gamma, cfg.step,
                               cfg.tail_mass_bound)));
      }
      break;
  }
  if (!status.ok()) return status;
  return Accountant(cfg, std::move(directions));
}

bool Accountant::tight() const {
  return std::all_of(directions_.begin(), directions_.end(),
                     [](const DirectionalPld& d) { return d.tight; });
}

absl::StatusOr<std::vector<double>> Accountant::EpsilonByDirection(
    double delta) const {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  std::vector<double> out;
  for (const DirectionalPld& d : directions_) {
    absl::StatusOr<double> eps = EpsilonOf(d.pld, delta);
    if (!eps.ok()) {
      return absl::OutOfRangeError(absl::StrFormat(
          "delta unreachable in the %s direction: %s", d.direction,
          std::string(eps.status().message())));
    }
    out.push_back(std::max(0.0, *eps));
  }
  return out;
}

absl::StatusOr<double> Accountant::EpsilonFor(double delta) const {
  absl::StatusOr<std::vector<double>> eps = EpsilonByDirection(delta);
  if (!eps.ok()) return eps.status();
  return *std::max_element(eps->begin(), eps->end());
}

std::vector<double> Accountant::DeltaByDirection(double eps) const {
  std::vector<double> out;
  for (const DirectionalPld& d : directions_) out.push_back(DeltaOf(d.pld, eps));
  return out;
}

double Accountant::DeltaFor(double eps) const {
  const std::vector<double> deltas = DeltaByDirection(eps);
  return *std::max_element(deltas.begin(), deltas.end());
}

absl::StatusOr<double> EpsilonFor(const AccountantConfig& cfg, double delta) {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  absl::StatusOr<Accountant> acc = Accountant::Create(cfg);
  if (!acc.ok()) return acc.status();
  return acc->EpsilonFor(delta);
}

absl::StatusOr<double> DeltaFor(const AccountantConfig& cfg, double eps) {
  absl::StatusOr<Accountant> acc = Accountant::Create(cfg);
  if (!acc.ok()) return acc.status();
  return acc->DeltaFor(eps);
}

absl::StatusOr<double> SigmaFor(const AccountantConfig& cfg, double epsilon,
                                double delta, const SigmaOptions& options) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  if (!(options.relative_tolerance > 0) ||
      !(options.min_sigma > 0 && options.min_sigma < options.max_sigma)) {
    return absl::InvalidArgumentError("invalid sigma search options");
  }
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;

  auto not_bracketable = [&] {
    return absl::OutOfRangeError(absl::StrFormat(
        "not bracketable: (eps=%g, delta=%g) needs a noise parameter outside "
        "[%g, %g]",
        epsilon, delta, options.min_sigma, options.max_sigma));
  };

  // Geometric bracket around 1, clamped to [min_sigma, max_sigma]. The
  // invariant is: lo fails the target, hi meets it.
  double start = std::clamp(1.0, options.min_sigma, options.max_sigma);
  absl::StatusOr<bool> ok = MeetsTarget(cfg, start, epsilon, delta);
  if (!ok.ok()) return ok.status();
  double lo;
  double hi;
  if (*ok) {
    hi = start;
    lo = start;
    while (true) {
      if (lo <= options.min_sigma) return not_bracketable();
      const double next = std::max(lo / 2, options.min_sigma);
      absl::StatusOr<bool> meets = MeetsTarget(cfg, next, epsilon, delta);
      if (!meets.ok()) return meets.status();
      if (!*meets) {
        lo = next;
        break;
      }
      hi = next;
      lo = next;
    }
  } else {
    lo = start;
    hi = start;
    while (true) {
      if (hi >= options.max_sigma) return not_bracketable();
      const double next = std::min(hi * 2, options.max_sigma);
      absl::StatusOr<bool> meets = MeetsTarget(cfg, next, epsilon, delta);
      if (!meets.ok()) return meets.status();
      if (*meets) {
        hi = next;
        break;
      }
      lo = next;
      hi = next;
    }
  }

  while ((hi - lo) > options.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<bool> meets = MeetsTarget(cfg, mid, epsilon, delta);
    if (!meets.ok()) return meets.status();
    (*meets ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> DefaultFigure2Gammas() {
  std::vector<double> gammas;
  for (int i = -8; i <= 0; ++i) gammas.push_back(std::pow(10.0, i / 2.0));
  return gammas;
}

absl::StatusOr<std::vector<Figure2Row>> SweepFigure2(
    const Figure2Options& options) {
  const std::vector<double> gammas =
      options.gammas.empty() ? DefaultFigure2Gammas() : options.gammas;
  for (double g : gammas) {
    if (!(g >= 1e-4 && g <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sweep sampling rate %g outside [1e-4, 1]", g));
    }
  }
  std::vector<Figure2Row> rows;
  for (double eps : options.poisson_eps) {
    for (double g : gammas) rows.push_back({SchemeKind::kPoisson, eps, g, 0});
  }
  for (double eps : options.wor_eps) {
    for (double g : gammas) rows.push_back({SchemeKind::kWor, eps, g, 0});
  }
  std::vector<absl::Status> status(rows.size());
  kernels::ParallelFor(static_cast<int64_t>(rows.size()), [&](int64_t i) {
    Figure2Row& row = rows[i];
    AccountantConfig cfg;
    cfg.mech = MechanismSpec{NoiseKind::kGaussian, 1.0};
    cfg.scheme = SamplingScheme{row.scheme, row.gamma};
    cfg.relation = Relation::kAddRemove;
    cfg.k = options.k;
    cfg.step = options.step;
    cfg.tail_mass_bound = options.tail_mass_bound;
    absl::StatusOr<double> sigma =
        SigmaFor(cfg, row.epsilon, options.delta, options.sigma);
    if (sigma.ok()) {
      row.sigma = *sigma;
    } else {
      status[i] = sigma.status();
    }
  });
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return rows;
}

}  // namespace dpacct
