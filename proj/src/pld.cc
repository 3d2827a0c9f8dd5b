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

#include "dpacct/pld.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpacct/divergence.h"
#include "dpacct/numeric.h"
#include "dpacct/privacy_curve.h"
#include "json.hpp"

namespace dpacct {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-9;
constexpr double kClipTolerance = 1e-9;
constexpr int kMaxRangeExpansions = 60;
constexpr double kRelativeNoiseFloor = 1e-15;

absl::Status CheckStep(double step, double tail_mass_bound) {
  if (!std::isfinite(step) || !(step > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid step: must be finite and > 0, got ", step));
  }
  if (!(tail_mass_bound > 0 && tail_mass_bound < 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tail mass bound must lie in (0, 1), got ", tail_mass_bound));
  }
  return absl::OkStatus();
}

// Smallest x in [lo, hi] with tail(x) <= bound for nonincreasing tail.
template <typename Tail>
double BisectDown(Tail tail, double lo, double hi, double bound, double tol) {
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) <= bound) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct LatticeRange {
  int64_t lo_index;
  int64_t hi_index;
};

// Lattice indices [lo, hi] with P(L < lo * step) and P(L > hi * step) both
// at most tail_mass_bound.
absl::StatusOr<LatticeRange> LossLattice(const PrivacyLoss& loss, double step,
                                         double tail_mass_bound,
                                         int64_t max_points) {
  auto upper = [&loss](double level) { return loss.UpperTail(level).p; };
  auto lower = [&loss](double level) { return loss.LowerTail(level).p; };
  const double min_loss = loss.MinLoss();
  const double max_loss = loss.MaxLoss();
  const double span = max_loss - min_loss + 1.0;
  const double tol = 1e-3 * step;

  double top = max_loss;
  for (int j = 0; upper(top) > tail_mass_bound; ++j) {
    if (j == kMaxRangeExpansions) {
      return absl::ResourceExhaustedError(
          "privacy loss upper tail does not fall below the tail mass bound");
    }
    top = max_loss + span * std::ldexp(1.0, j);
  }
  double bottom = min_loss;
  for (int j = 0; lower(bottom) > tail_mass_bound; ++j) {
    if (j == kMaxRangeExpansions) {
      return absl::ResourceExhaustedError(
          "privacy loss lower tail does not fall below the tail mass bound");
    }
    bottom = min_loss - span * std::ldexp(1.0, j);
  }
  const double hi = BisectDown(upper, bottom - 1.0, top, tail_mass_bound, tol);
  // Largest level with lower(level) <= bound, via the mirrored tail.
  const double lo = -BisectDown([&](double x) { return lower(-x); }, -top,
                                -bottom + 1.0, tail_mass_bound, tol);

  LatticeRange range{static_cast<int64_t>(std::floor(lo / step)),
                     static_cast<int64_t>(std::ceil(hi / step))};
  range.lo_index = std::min(range.lo_index, range.hi_index);
  if (range.hi_index - range.lo_index + 1 > max_points) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "loss lattice needs %d points at step %g (budget %d)",
        range.hi_index - range.lo_index + 1, step, max_points));
  }
  return range;
}

// Removes `excess` mass starting from the lowest atoms. Losing mass at the
// bottom of the lattice can only raise the curve at larger eps.
void AbsorbFromBottom(std::vector<double>& masses, double excess) {
  for (size_t i = 0; i < masses.size() && excess > 0; ++i) {
    const double take = std::min(masses[i], excess);
    masses[i] -= take;
    excess -= take;
  }
}

// Connect-the-dots on a uniform lattice. With s = step and D_j the curve
// value at lattice point j, atom j (0 < j < n-1) gets
//   ((D_{j+1} - D_j) - e^s (D_j - D_{j-1})) / (e^s - 1),
// the top atom e^s (D_{n-2} - D_{n-1}) / (e^s - 1), mass_inf = D_{n-1} and
// the bottom atom the remainder.
absl::StatusOr<DiscretePLD> ConnectTheDots(double loss_start, double step,
                                           std::span<const double> deltas) {
  const int64_t n = static_cast<int64_t>(deltas.size());
  DiscretePLD pld;
  pld.loss_start = loss_start;
  pld.step = step;
  pld.pessimistic = true;
  pld.mass_inf = std::max(0.0, deltas.back());
  pld.masses.assign(n, 0.0);
  const double em1 = std::expm1(step);
  const double e = std::exp(step);
  // Rounding noise in the second differences is carried downward instead
  // of clipped, so the atoms still telescope to the input curve.
  double carry = 0;
  for (int64_t i = n - 1; i >= 1; --i) {
    const double right = i + 1 < n ? deltas[i + 1] - deltas[i] : 0.0;
    const double left = deltas[i] - deltas[i - 1];
    const double mass = (right - e * left) / em1;
    if (mass < -kClipTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "non-convex curve: atom at eps %.17g solves to mass %g",
          pld.LossAt(i), mass));
    }
    const double kept = mass + carry;
    pld.masses[i] = std::max(0.0, kept);
    carry = std::min(0.0, kept);
  }
  CompensatedSum above;
  for (int64_t i = n - 1; i >= 1; --i) above.Add(pld.masses[i]);
  above.Add(pld.mass_inf);
  const double bottom = 1.0 - above.Total();
  if (bottom < -kClipTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "non-convex curve: bottom atom solves to mass %g", bottom));
  }
  pld.masses[0] = std::max(0.0, bottom);
  AbsorbFromBottom(pld.masses, -std::min(0.0, bottom));
  return pld;
}

// Set difference outer - inner for sorted disjoint interval lists with inner inside outer.
std::vector<Interval> SetDifference(const std::vector<Interval>& outer,
                                    const std::vector<Interval>& inner) {
  std::vector<Interval> out;
  size_t k = 0;
  for (const Interval& o : outer) {
    double cursor = o.lo;
    while (k < inner.size() && inner[k].hi <= o.lo) ++k;
    while (k < inner.size() && inner[k].lo < o.hi) {
      if (inner[k].lo > cursor) out.push_back({cursor, inner[k].lo});
      cursor = std::max(cursor, inner[k].hi);
      if (inner[k].hi > o.hi) break;
      ++k;
    }
    if (cursor < o.hi) out.push_back({cursor, o.hi});
  }
  return out;
}

// Zeroes convolution entries below the round-off floor of the FFT, relative
// to the largest entry. Cleared positive mass is returned for mass_inf;
// cleared negative noise is taken back from the bottom atoms.
double ClearNoiseFloor(std::vector<double>& masses) {
  double peak = 0;
  for (double m : masses) peak = std::max(peak, m);
  const double floor = kRelativeNoiseFloor * peak;
  double removed = 0;
  double negative = 0;
  for (double& m : masses) {
    if (m < floor) {
      if (m > 0) {
        removed += m;
      } else {
        negative -= m;
      }
      m = 0;
    }
  }
  AbsorbFromBottom(masses, negative);
  return removed;
}

// Moves up to half the bound from each tail: the top into mass_inf, the
// bottom onto the first kept atom.
void TrimTails(DiscretePLD& pld, double tail_mass_bound) {
  const double budget = 0.5 * tail_mass_bound;
  std::vector<double>& m = pld.masses;
  int64_t top = pld.size() - 1;
  double acc = 0;
  while (top > 0 && acc + m[top] <= budget) acc += m[top--];
  m.resize(top + 1);
  pld.mass_inf += acc;

  int64_t bottom = 0;
  acc = 0;
  while (bottom < pld.size() - 1 && acc + m[bottom] <= budget) {
    acc += m[bottom++];
  }
  if (bottom > 0) {
    m.erase(m.begin(), m.begin() + bottom);
    m[0] += acc;
    pld.loss_start += bottom * pld.step;
  }
}

}  // namespace

std::string_view DiscretizationName(Discretization d) {
  return d == Discretization::kBucket ? "bucket" : "connect-the-dots";
}

absl::StatusOr<Discretization> ParseDiscretization(std::string_view text) {
  const std::string lower = absl::AsciiStrToLower(std::string(text));
  if (lower == "bucket") return Discretization::kBucket;
  if (lower == "connect-the-dots" || lower == "ctd") {
    return Discretization::kConnectTheDots;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown discretization '", std::string(text), "' (bucket|connect-the-dots)"));
}

double DiscretePLD::TotalMass() const {
  CompensatedSum sum;
  for (double m : masses) sum.Add(m);
  sum.Add(mass_inf);
  return sum.Total();
}

absl::Status ValidatePld(const DiscretePLD& pld) {
  if (!std::isfinite(pld.step) || !(pld.step > 0)) {
    return absl::InvalidArgumentError("invalid step");
  }
  if (!std::isfinite(pld.loss_start)) {
    return absl::InvalidArgumentError("loss_start is not finite");
  }
  if (pld.masses.empty()) {
    return absl::InvalidArgumentError("pld has no lattice atoms");
  }
  for (double m : pld.masses) {
    if (!std::isfinite(m) || m < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid atom mass ", m));
    }
  }
  if (!std::isfinite(pld.mass_inf) || pld.mass_inf < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid mass_inf ", pld.mass_inf));
  }
  const double total = pld.TotalMass();
  if (std::abs(total - 1.0) > kMassTolerance) {
    return absl::FailedPreconditionError(
        absl::StrFormat("pld total mass %.17g is not 1", total));
  }
  return absl::OkStatus();
}

DiscretePLD PointMassPld(double step) {
  return DiscretePLD{.loss_start = 0,
                     .step = step,
                     .masses = {1.0},
                     .mass_inf = 0,
                     .pessimistic = true};
}

absl::StatusOr<DiscretePLD> PldFromPair(const Distribution& p,
                                        const Distribution& q, double step,
                                        double tail_mass_bound) {
  if (absl::Status s = CheckStep(step, tail_mass_bound); !s.ok()) return s;
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(p, q);
  if (!loss.ok()) return loss.status();
  absl::StatusOr<LatticeRange> range =
      LossLattice(*loss, step, tail_mass_bound, kDefaultMaxPoints);
  if (!range.ok()) return range.status();

  const int64_t n = range->hi_index - range->lo_index + 1;
  std::vector<double> levels(n);
  for (int64_t i = 0; i < n; ++i) levels[i] = (range->lo_index + i) * step;
  const std::vector<double> upper = kernels::MapGrid(
      levels, [&loss](double level) { return loss->UpperTail(level).p; });

  DiscretePLD pld;
  pld.loss_start = levels.front();
  pld.step = step;
  pld.pessimistic = true;
  pld.masses.resize(n);
  pld.masses[0] = std::max(0.0, 1.0 - upper[0]);
  for (int64_t i = 1; i < n; ++i) {
    pld.masses[i] = std::max(0.0, upper[i - 1] - upper[i]);
  }
  pld.mass_inf = upper[n - 1];
  return pld;
}

absl::StatusOr<DiscretePLD> PldFromDeltaCurve(std::span<const double> eps_grid,
                                              std::span<const double> deltas) {
  if (eps_grid.size() != deltas.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps_grid has %d points but deltas has %d",
                        eps_grid.size(), deltas.size()));
  }
  if (eps_grid.size() < 2) {
    return absl::InvalidArgumentError("connect-the-dots needs >= 2 points");
  }
  std::vector<CurvePoint> points;
  points.reserve(eps_grid.size());
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    points.push_back({eps_grid[i], deltas[i]});
  }
  if (absl::Status s = ValidatePrivacyCurve(points); !s.ok()) return s;

  const int64_t n = static_cast<int64_t>(eps_grid.size());
  const double step = (eps_grid.back() - eps_grid.front()) / (n - 1);
  for (int64_t i = 0; i < n; ++i) {
    const double expected = eps_grid.front() + i * step;
    if (std::abs(eps_grid[i] - expected) > 1e-7 * step) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "eps_grid must be uniform: entry %d is %.17g, expected %.17g", i,
          eps_grid[i], expected));
    }
  }
  return ConnectTheDots(eps_grid.front(), step, deltas);
}

absl::StatusOr<DiscretePLD> PldFromPairConnectTheDots(const Distribution& p,
                                                      const Distribution& q,
                                                      double step,
                                                      double tail_mass_bound) {
  if (absl::Status s = CheckStep(step, tail_mass_bound); !s.ok()) return s;
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(p, q);
  if (!loss.ok()) return loss.status();
  absl::StatusOr<LatticeRange> range =
      LossLattice(*loss, step, tail_mass_bound, kDefaultMaxPoints);
  if (!range.ok()) return range.status();

  const int64_t n = range->hi_index - range->lo_index + 1;
  auto eps_at = [&](int64_t i) { return (range->lo_index + i) * step; };
  DiscretePLD pld;
  pld.loss_start = eps_at(0);
  pld.step = step;
  pld.pessimistic = true;
  pld.masses.assign(n, 0.0);
  const PairMass top_tail = loss->UpperTail(eps_at(n - 1));
  pld.mass_inf = std::max(
      0.0, top_tail.p - std::exp(eps_at(n - 1)) * top_tail.q);
  if (n == 1) {
    pld.masses[0] = 1.0 - pld.mass_inf;
    return pld;
  }

  // The curve is computed from per-bucket integrals rather than second
  // differences of delta, which lose all precision where delta is near 1.
  // For bucket B_i = {eps_{i-1} < L <= eps_i} and t_i = e^{eps_i}:
  //   u_i = int_{B_i} (p - t_{i-1} q) >= 0,  v_i = int_{B_i} (t_i q - p) >= 0
  // and atom i receives (e^s u_i + v_{i+1}) / (e^s - 1).
  std::vector<std::vector<Interval>> sets(n);
  kernels::ParallelFor(n, [&](int64_t i) {
    sets[i] = loss->SuperLevelSet(eps_at(i));
  });
  std::vector<double> u(n, 0.0);
  std::vector<double> v(n, 0.0);
  kernels::ParallelFor(n - 1, [&](int64_t j) {
    const int64_t i = j + 1;
    double a = 0;
    double b = 0;
    for (const Interval& iv : SetDifference(sets[i - 1], sets[i])) {
      a += IntervalMass(p, iv.lo, iv.hi);
      b += IntervalMass(q, iv.lo, iv.hi);
    }
    u[i] = std::max(0.0, a - std::exp(eps_at(i - 1)) * b);
    v[i] = std::max(0.0, std::exp(eps_at(i)) * b - a);
  });
  const double e = std::exp(step);
  const double em1 = std::expm1(step);
  for (int64_t i = 1; i < n - 1; ++i) {
    pld.masses[i] = (e * u[i] + v[i + 1]) / em1;
  }
  pld.masses[n - 1] =
      e * u[n - 1] / em1 + std::exp(eps_at(n - 1)) * top_tail.q;
  CompensatedSum above;
  for (int64_t i = n - 1; i >= 1; --i) above.Add(pld.masses[i]);
  above.Add(pld.mass_inf);
  const double bottom = 1.0 - above.Total();
  if (bottom < -kClipTolerance) {
    return absl::InternalError(absl::StrFormat(
        "connect-the-dots bottom atom solves to mass %g", bottom));
  }
  pld.masses[0] = std::max(0.0, bottom);
  AbsorbFromBottom(pld.masses, -std::min(0.0, bottom));
  return pld;
}

absl::StatusOr<std::pair<double, double>> LossRange(const Distribution& p,
                                                    const Distribution& q,
                                                    double step,
                                                    double tail_mass_bound) {
  if (absl::Status s = CheckStep(step, tail_mass_bound); !s.ok()) return s;
  absl::StatusOr<PrivacyLoss> loss = PrivacyLoss::Create(p, q);
  if (!loss.ok()) return loss.status();
  absl::StatusOr<LatticeRange> range =
      LossLattice(*loss, step, tail_mass_bound, kDefaultMaxPoints);
  if (!range.ok()) return range.status();
  return std::make_pair(range->lo_index * step, range->hi_index * step);
}

absl::StatusOr<DiscretePLD> PldForPair(const Distribution& p,
                                       const Distribution& q,
                                       Discretization discretization,
                                       double step, double tail_mass_bound) {
  if (discretization == Discretization::kBucket) {
    return PldFromPair(p, q, step, tail_mass_bound);
  }
  return PldFromPairConnectTheDots(p, q, step, tail_mass_bound);
}

double DeltaOf(const DiscretePLD& pld, double eps) {
  return kernels::DeltaOf(pld.View(), eps);
}

std::vector<double> DeltaOf(const DiscretePLD& pld,
                            std::span<const double> eps) {
  return kernels::DeltaOfMany(pld.View(), eps);
}

absl::StatusOr<double> EpsilonOf(const DiscretePLD& pld, double delta) {
  if (std::isnan(delta) || delta <= pld.mass_inf) {
    return absl::OutOfRangeError(absl::StrFormat(
        "delta %g unreachable: the pld has mass %g at infinite loss", delta,
        pld.mass_inf));
  }
  const double total = pld.TotalMass();
  if (delta >= std::min(1.0, total)) return -kInf;

  // DeltaOf is nonincreasing in eps; the top atom gives mass_inf < delta.
  int64_t lo = -1;
  int64_t hi = pld.size() - 1;
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (DeltaOf(pld, pld.LossAt(mid)) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi > 0) return pld.LossAt(hi);

  // Below the bottom atom every atom counts:
  // delta(eps) = total - e^{eps - l0} sum_i m_i e^{l0 - l_i}.
  CompensatedSum scaled;
  for (int64_t i = 0; i < pld.size(); ++i) {
    scaled.Add(pld.masses[i] * std::exp(-i * pld.step));
  }
  const double ratio = (total - delta) / scaled.Total();
  if (!(ratio > 0)) return -kInf;
  const double below = -std::log(ratio);  // distance under the bottom atom
  if (below <= 0) return pld.loss_start;
  return pld.loss_start - std::floor(below / pld.step) * pld.step;
}

absl::StatusOr<DiscretePLD> Compose(const DiscretePLD& a, const DiscretePLD& b,
                                    const CompositionOptions& options) {
  if (std::abs(a.step - b.step) > 1e-12 * std::max(a.step, b.step)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "step mismatch: %.17g vs %.17g", a.step, b.step));
  }
  if (a.pessimistic != b.pessimistic) {
    return absl::InvalidArgumentError("cannot compose pessimistic with "
                                      "optimistic plds");
  }
  DiscretePLD out;
  out.step = a.step;
  out.pessimistic = a.pessimistic;
  out.loss_start = a.loss_start + b.loss_start;
  out.masses = kernels::Convolve(a.masses, b.masses);
  out.mass_inf = a.mass_inf + b.mass_inf - a.mass_inf * b.mass_inf;
  out.mass_inf += ClearNoiseFloor(out.masses);
  TrimTails(out, options.tail_mass_bound);
  if (out.size() > options.max_points) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "overflow budget: composed pld needs %d points after trimming "
        "%g tail mass (budget %d)",
        out.size(), options.tail_mass_bound, options.max_points));
  }
  return out;
}

absl::StatusOr<DiscretePLD> SelfCompose(const DiscretePLD& pld, int64_t k,
                                        const CompositionOptions& options) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("composition count must be >= 1, got ", k));
  }
  if (k == 1) return pld;
  std::optional<DiscretePLD> result;
  DiscretePLD base = pld;
  while (true) {
    if (k & 1) {
      if (result.has_value()) {
        absl::StatusOr<DiscretePLD> next = Compose(*result, base, options);
        if (!next.ok()) return next.status();
        result = *std::move(next);
      } else {
        result = base;
      }
    }
    k >>= 1;
    if (k == 0) break;
    absl::StatusOr<DiscretePLD> squared = Compose(base, base, options);
    if (!squared.ok()) return squared.status();
    base = *std::move(squared);
  }
  return *std::move(result);
}

std::string PldToJson(const DiscretePLD& pld) {
  nlohmann::json j;
  j["loss_start"] = pld.loss_start;
  j["step"] = pld.step;
  j["masses"] = pld.masses;
  j["mass_inf"] = pld.mass_inf;
  j["pessimistic"] = pld.pessimistic;
  return j.dump();
}

absl::StatusOr<DiscretePLD> PldFromJson(std::string_view json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("pld json is not an object");
  }
  DiscretePLD pld;
  try {
    pld.loss_start = j.at("loss_start").get<double>();
    pld.step = j.at("step").get<double>();
    pld.masses = j.at("masses").get<std::vector<double>>();
    pld.mass_inf = j.at("mass_inf").get<double>();
    pld.pessimistic = j.at("pessimistic").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad pld json: ", e.what()));
  }
  if (absl::Status s = ValidatePld(pld); !s.ok()) return s;
  return pld;
}

}  // namespace dpacct
