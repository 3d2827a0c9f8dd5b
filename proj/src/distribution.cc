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

#include "dpacct/distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpacct/numeric.h"

namespace dpacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double GaussianLogPdf(const GaussianLaw& g, double x) {
  const double z = (x - g.mean) / g.stddev;
  return -0.5 * z * z - std::log(g.stddev) -
         0.5 * std::log(2 * std::numbers::pi);
}

double LaplaceLogPdf(const LaplaceLaw& l, double x) {
  return -std::abs(x - l.location) / l.scale - std::log(2 * l.scale);
}

double GaussianCdf(const GaussianLaw& g, double x) {
  return 0.5 * std::erfc(-(x - g.mean) / (g.stddev * std::numbers::sqrt2));
}

double GaussianSf(const GaussianLaw& g, double x) {
  return 0.5 * std::erfc((x - g.mean) / (g.stddev * std::numbers::sqrt2));
}

double LaplaceCdf(const LaplaceLaw& l, double x) {
  const double z = (x - l.location) / l.scale;
  return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double LaplaceSf(const LaplaceLaw& l, double x) {
  const double z = (x - l.location) / l.scale;
  return z < 0 ? 1.0 - 0.5 * std::exp(z) : 0.5 * std::exp(-z);
}

// Interval mass of a single location/scale component. Picks the tail form on
// the side of the center where both endpoints lie.
template <typename Law, typename CdfFn, typename SfFn>
double ComponentIntervalMass(const Law& law, double center, double a, double b,
                             CdfFn cdf, SfFn sf) {
  if (!(a < b)) return 0.0;
  if (a >= center) return std::max(0.0, sf(law, a) - sf(law, b));
  if (b <= center) return std::max(0.0, cdf(law, b) - cdf(law, a));
  return std::max(0.0, 1.0 - cdf(law, a) - sf(law, b));
}

bool IsFinite(double v) { return std::isfinite(v); }

}  // namespace

absl::StatusOr<Distribution> Distribution::Gaussian(double mean,
                                                    double stddev) {
  if (!IsFinite(mean) || !IsFinite(stddev) || !(stddev > 0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Gaussian requires finite mean and stddev > 0, got (%g, %g)", mean,
        stddev));
  }
  return Distribution(GaussianLaw{mean, stddev});
}

absl::StatusOr<Distribution> Distribution::Laplace(double location,
                                                   double scale) {
  if (!IsFinite(location) || !IsFinite(scale) || !(scale > 0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Laplace requires finite location and scale > 0, got (%g, %g)",
        location, scale));
  }
  return Distribution(LaplaceLaw{location, scale});
}

absl::StatusOr<Distribution> Distribution::Mixture(
    std::vector<double> weights, std::vector<Distribution> components) {
  if (weights.size() != components.size()) {
    return absl::InvalidArgumentError(
        "mixture weights and components differ in length");
  }
  if (components.size() < 2 ||
      components.size() > static_cast<size_t>(kMaxMixtureComponents)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mixtures need between 2 and ", kMaxMixtureComponents,
        " components, got ", components.size()));
  }
  double total = 0;
  for (double w : weights) {
    if (!IsFinite(w) || w < 0) {
      return absl::InvalidArgumentError("mixture weights must be >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mixture weights sum to %.17g, not 1", total));
  }
  const bool continuous = components.front().IsContinuous();
  for (const Distribution& c : components) {
    if (c.IsMixture()) {
      return absl::InvalidArgumentError("mixture components cannot be mixtures");
    }
    if (c.IsContinuous() != continuous) {
      return absl::InvalidArgumentError(
          "mixture components must be all continuous or all discrete");
    }
  }
  return Distribution(MixtureLaw{std::move(weights), std::move(components)});
}

absl::StatusOr<Distribution> Distribution::Discrete(
    std::vector<double> outcomes, std::vector<Rational> probs) {
  if (outcomes.size() != probs.size() || outcomes.empty()) {
    return absl::InvalidArgumentError(
        "discrete law needs equally many (>0) outcomes and probabilities");
  }
  std::set<double> seen;
  for (double o : outcomes) {
    if (!IsFinite(o) || !seen.insert(o).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("discrete outcome labels must be finite and distinct: ",
                       o));
    }
  }
  Rational total(0);
  std::vector<double> as_double;
  as_double.reserve(probs.size());
  for (const Rational& p : probs) {
    if (p.IsNegative()) {
      return absl::InvalidArgumentError("discrete probabilities must be >= 0");
    }
    total += p;
    as_double.push_back(p.ToDouble());
  }
  if (total != Rational(1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete probabilities sum to ", total.ToString(), ", not 1"));
  }
  return Distribution(
      DiscreteLaw{std::move(outcomes), std::move(probs), std::move(as_double)});
}

bool Distribution::IsContinuous() const {
  if (std::holds_alternative<DiscreteLaw>(law_)) return false;
  if (const auto* m = std::get_if<MixtureLaw>(&law_)) {
    return m->components.front().IsContinuous();
  }
  return true;
}

std::vector<std::pair<double, double>> Distribution::LocationScales() const {
  std::vector<std::pair<double, double>> out;
  std::visit(
      [&out](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          out.emplace_back(law.mean, law.stddev);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          out.emplace_back(law.location, law.scale);
        } else if constexpr (std::is_same_v<T, MixtureLaw>) {
          for (const Distribution& c : law.components) {
            auto sub = c.LocationScales();
            out.insert(out.end(), sub.begin(), sub.end());
          }
        }
      },
      law_);
  return out;
}

Distribution Distribution::Shifted(double shift) const {
  return std::visit(
      [shift](const auto& law) -> Distribution {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return Distribution(GaussianLaw{law.mean + shift, law.stddev});
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          return Distribution(LaplaceLaw{law.location + shift, law.scale});
        } else if constexpr (std::is_same_v<T, MixtureLaw>) {
          MixtureLaw moved{law.weights, {}};
          for (const Distribution& c : law.components) {
            moved.components.push_back(c.Shifted(shift));
          }
          return Distribution(std::move(moved));
        } else {
          DiscreteLaw moved = law;
          for (double& o : moved.outcomes) o += shift;
          return Distribution(std::move(moved));
        }
      },
      law_);
}

std::string Distribution::DebugString() const {
  return std::visit(
      [](const auto& law) -> std::string {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return absl::StrFormat("N(%g, %g^2)", law.mean, law.stddev);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          return absl::StrFormat("Lap(%g, %g)", law.location, law.scale);
        } else if constexpr (std::is_same_v<T, MixtureLaw>) {
          std::vector<std::string> terms;
          for (size_t i = 0; i < law.weights.size(); ++i) {
            terms.push_back(absl::StrFormat(
                "%g*%s", law.weights[i], law.components[i].DebugString()));
          }
          return absl::StrJoin(terms, " + ");
        } else {
          std::vector<std::string> terms;
          for (size_t i = 0; i < law.outcomes.size(); ++i) {
            terms.push_back(absl::StrFormat("%g:%s", law.outcomes[i],
                                            law.probs[i].ToString()));
          }
          return absl::StrCat("Discrete{", absl::StrJoin(terms, ", "), "}");
        }
      },
      law_);
}

absl::StatusOr<ProductDistribution> MakeProduct(
    std::vector<Distribution> factors) {
  if (factors.empty()) {
    return absl::InvalidArgumentError("product needs at least one factor");
  }
  return ProductDistribution{std::move(factors)};
}

double Pdf(const Distribution& d, double x) {
  if (const auto* disc = std::get_if<DiscreteLaw>(&d.law())) {
    for (size_t i = 0; i < disc->outcomes.size(); ++i) {
      if (disc->outcomes[i] == x) return disc->probs_double[i];
    }
    return 0.0;
  }
  if (const auto* m = std::get_if<MixtureLaw>(&d.law())) {
    double total = 0;
    for (size_t i = 0; i < m->weights.size(); ++i) {
      total += m->weights[i] * Pdf(m->components[i], x);
    }
    return total;
  }
  return std::exp(LogPdf(d, x));
}

double LogPdf(const Distribution& d, double x) {
  return std::visit(
      [x](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return GaussianLogPdf(law, x);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          return LaplaceLogPdf(law, x);
        } else if constexpr (std::is_same_v<T, MixtureLaw>) {
          double terms[kMaxMixtureComponents];
          size_t n = 0;
          for (size_t i = 0; i < law.weights.size(); ++i) {
            terms[n++] = law.weights[i] > 0
                             ? std::log(law.weights[i]) +
                                   LogPdf(law.components[i], x)
                             : -kInf;
          }
          return LogSumExp(std::span<const double>(terms, n));
        } else {
          for (size_t i = 0; i < law.outcomes.size(); ++i) {
            if (law.outcomes[i] == x) return std::log(law.probs_double[i]);
          }
          return -kInf;
        }
      },
      d.law());
}

absl::StatusOr<double> Cdf(const Distribution& d, double x) {
  if (!d.IsContinuous()) {
    return absl::InvalidArgumentError("cdf: unsupported variant (discrete)");
  }
  if (const auto* g = std::get_if<GaussianLaw>(&d.law())) {
    return GaussianCdf(*g, x);
  }
  if (const auto* l = std::get_if<LaplaceLaw>(&d.law())) {
    return LaplaceCdf(*l, x);
  }
  const auto& m = std::get<MixtureLaw>(d.law());
  double total = 0;
  for (size_t i = 0; i < m.weights.size(); ++i) {
    total += m.weights[i] * *Cdf(m.components[i], x);
  }
  return std::clamp(total, 0.0, 1.0);
}

absl::StatusOr<double> Sf(const Distribution& d, double x) {
  if (!d.IsContinuous()) {
    return absl::InvalidArgumentError("sf: unsupported variant (discrete)");
  }
  if (const auto* g = std::get_if<GaussianLaw>(&d.law())) {
    return GaussianSf(*g, x);
  }
  if (const auto* l = std::get_if<LaplaceLaw>(&d.law())) {
    return LaplaceSf(*l, x);
  }
  const auto& m = std::get<MixtureLaw>(d.law());
  double total = 0;
  for (size_t i = 0; i < m.weights.size(); ++i) {
    total += m.weights[i] * *Sf(m.components[i], x);
  }
  return std::clamp(total, 0.0, 1.0);
}

double IntervalMass(const Distribution& d, double a, double b) {
  if (const auto* g = std::get_if<GaussianLaw>(&d.law())) {
    return ComponentIntervalMass(*g, g->mean, a, b, GaussianCdf, GaussianSf);
  }
  if (const auto* l = std::get_if<LaplaceLaw>(&d.law())) {
    return ComponentIntervalMass(*l, l->location, a, b, LaplaceCdf, LaplaceSf);
  }
  const auto& m = std::get<MixtureLaw>(d.law());
  double total = 0;
  for (size_t i = 0; i < m.weights.size(); ++i) {
    if (m.weights[i] > 0) {
      total += m.weights[i] * IntervalMass(m.components[i], a, b);
    }
  }
  return total;
}

absl::StatusOr<double> LogDensityRatio(const Distribution& p,
                                       const Distribution& q, double x) {
  if (p.IsContinuous() != q.IsContinuous()) {
    return absl::InvalidArgumentError(
        "log_density_ratio: mismatched support kind (continuous vs discrete)");
  }
  const double lp = LogPdf(p, x);
  const double lq = LogPdf(q, x);
  if (lp == -kInf && lq == -kInf) return 0.0;
  if (lq == -kInf) return kInf;
  if (lp == -kInf) return -kInf;
  return lp - lq;
}

double Sample(const Distribution& d, Rng& rng) {
  return std::visit(
      [&rng](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          std::normal_distribution<double> normal(law.mean, law.stddev);
          return normal(rng);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          // Inverse cdf on a symmetric uniform in (-1/2, 1/2).
          double u = unit(rng) - 0.5;
          while (u == -0.5) u = unit(rng) - 0.5;
          const double magnitude = -law.scale * std::log1p(-2 * std::abs(u));
          return u < 0 ? law.location - magnitude : law.location + magnitude;
        } else if constexpr (std::is_same_v<T, MixtureLaw>) {
          const double u = unit(rng);
          double acc = 0;
          for (size_t i = 0; i < law.weights.size(); ++i) {
            acc += law.weights[i];
            if (u < acc) return Sample(law.components[i], rng);
          }
          return Sample(law.components.back(), rng);
        } else {
          const double u = unit(rng);
          double acc = 0;
          for (size_t i = 0; i < law.outcomes.size(); ++i) {
            acc += law.probs_double[i];
            if (u < acc) return law.outcomes[i];
          }
          return law.outcomes.back();
        }
      },
      d.law());
}

std::pair<double, double> SupportWindow(const Distribution& d, double width) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& [loc, scale] : d.LocationScales()) {
    lo = std::min(lo, loc - width * scale);
    hi = std::max(hi, loc + width * scale);
  }
  return {lo, hi};
}

}  // namespace dpacct
