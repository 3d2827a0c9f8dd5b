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

#include "dpacct/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpacct/divergence.h"
#include "dpacct/kernels.h"
#include "dpacct/pairs.h"
#include "dpacct/pld.h"
#include "dpacct/rdp.h"

namespace dpacct {
namespace {

std::vector<double> UniformGrid(double lo, double step, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + i * step;
  return grid;
}

absl::StatusOr<ProductDistribution> Repeat(const Distribution& d, int k) {
  return MakeProduct(std::vector<Distribution>(k, d));
}

struct PairPlds {
  DiscretePLD add;
  DiscretePLD remove;
};

absl::StatusOr<PairPlds> SingleStepPlds(const MechanismSpec& mech,
                                        const SamplingScheme& scheme,
                                        double step, double tail) {
  const DominatingPair add = PairAdd(mech, scheme);
  const DominatingPair remove = PairRemove(mech, scheme);
  absl::StatusOr<DiscretePLD> a =
      PldFromPairConnectTheDots(add.p, add.q, step, tail);
  if (!a.ok()) return a.status();
  absl::StatusOr<DiscretePLD> r =
      PldFromPairConnectTheDots(remove.p, remove.q, step, tail);
  if (!r.ok()) return r.status();
  return PairPlds{*std::move(a), *std::move(r)};
}

struct Gaps {
  double remove_gap = -std::numeric_limits<double>::infinity();
  double eps_remove = 0;
  double add_gap = -std::numeric_limits<double>::infinity();
  double eps_add = 0;
};

Gaps LargestGaps(std::span<const double> eps, std::span<const double> add,
                 std::span<const double> remove) {
  Gaps g;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] < 0) continue;
    if (remove[i] - add[i] > g.remove_gap) {
      g.remove_gap = remove[i] - add[i];
      g.eps_remove = eps[i];
    }
    if (add[i] - remove[i] > g.add_gap) {
      g.add_gap = add[i] - remove[i];
      g.eps_add = eps[i];
    }
  }
  return g;
}

}  // namespace

absl::StatusOr<RrOracleResult> RrOracle() {
  absl::StatusOr<Distribution> p =
      Distribution::Discrete({0, 1}, {Rational(3, 4), Rational(1, 4)});
  if (!p.ok()) return p.status();
  absl::StatusOr<Distribution> q =
      Distribution::Discrete({0, 1}, {Rational(1, 2), Rational(1, 2)});
  if (!q.ok()) return q.status();
  absl::StatusOr<ProductDistribution> pp = Repeat(*p, 2);
  if (!pp.ok()) return pp.status();
  absl::StatusOr<ProductDistribution> qq = Repeat(*q, 2);
  if (!qq.ok()) return qq.status();

  RrOracleResult r;
  const std::pair<Rational*, std::pair<bool, Rational>> cases[] = {
      {&r.h43_pq, {true, Rational(4, 3)}},
      {&r.h43_qp, {false, Rational(4, 3)}},
      {&r.h2_pq, {true, Rational(2)}},
      {&r.h2_qp, {false, Rational(2)}},
  };
  for (const auto& [out, spec] : cases) {
    const auto& [forward, alpha] = spec;
    absl::StatusOr<Rational> h = forward ? HockeyStickProduct(*pp, *qq, alpha)
                                         : HockeyStickProduct(*qq, *pp, alpha);
    if (!h.ok()) return h.status();
    *out = *h;
  }
  r.order_flips = r.h43_pq > r.h43_qp && r.h2_pq < r.h2_qp;
  return r;
}

std::string FormatRrOracle(const RrOracleResult& r) {
  return absl::StrCat("H_{4/3}(P||Q)=", r.h43_pq.ToString(),
                      ", H_{4/3}(Q||P)=", r.h43_qp.ToString(),
                      ", H_2(P||Q)=", r.h2_pq.ToString(),
                      ", H_2(Q||P)=", r.h2_qp.ToString());
}

std::vector<double> DefaultFig1EpsGrid() { return UniformGrid(0, 0.025, 40); }

absl::StatusOr<Fig1Result> ExperimentFig1(const Fig1Options& options) {
  if (options.gammas.empty()) {
    return absl::InvalidArgumentError("no candidate sampling rates");
  }
  absl::StatusOr<MechanismSpec> mech = MechanismSpec::Laplace(options.scale);
  if (!mech.ok()) return mech.status();
  const std::vector<double> grid =
      options.eps_grid.empty() ? DefaultFig1EpsGrid() : options.eps_grid;
  if (absl::Status s = CheckStrictlyIncreasing(grid); !s.ok()) return s;
  const double slack = std::expm1(2 * options.step);

  Fig1Result result;
  PairPlds single;
  std::vector<double> add2;
  std::vector<double> remove2;
  for (double gamma : options.gammas) {
    absl::StatusOr<SamplingScheme> scheme = SamplingScheme::Poisson(gamma);
    if (!scheme.ok()) return scheme.status();
    absl::StatusOr<PairPlds> plds = SingleStepPlds(
        *mech, *scheme, options.step, options.tail_mass_bound);
    if (!plds.ok()) return plds.status();
    absl::StatusOr<DiscretePLD> a2 = Compose(plds->add, plds->add);
    if (!a2.ok()) return a2.status();
    absl::StatusOr<DiscretePLD> r2 = Compose(plds->remove, plds->remove);
    if (!r2.ok()) return r2.status();
    add2 = DeltaOf(*a2, grid);
    remove2 = DeltaOf(*r2, grid);
    single = *std::move(plds);
    result.gamma = gamma;

    const Gaps g = LargestGaps(grid, add2, remove2);
    Fig1Crossing& c = result.crossing;
    c.eps_remove_above = g.eps_remove;
    c.remove_gap = g.remove_gap;
    c.eps_add_above = g.eps_add;
    c.add_gap = g.add_gap;
    c.slack = slack;
    const double needed =
        std::max(options.slack_factor * slack, 2 * options.mc.accuracy);
    c.found = g.remove_gap > needed && g.add_gap > needed;
    if (c.found) break;
  }

  const SamplingScheme scheme{SchemeKind::kPoisson, result.gamma};
  const DominatingPair add_pair = PairAdd(*mech, scheme);
  const DominatingPair remove_pair = PairRemove(*mech, scheme);
  std::vector<double> mc_add2;
  std::vector<double> mc_remove2;
  for (int k : options.k_list) {
    if (k < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("composition count must be >= 1, got ", k));
    }
    if (k <= 2) {
      std::vector<double> add = add2;
      std::vector<double> remove = remove2;
      if (k == 1) {
        add = DeltaOf(single.add, grid);
        remove = DeltaOf(single.remove, grid);
      }
      const double band = std::expm1(k * options.step);
      for (size_t i = 0; i < grid.size(); ++i) {
        result.rows.push_back({k, "pld", grid[i], add[i], remove[i], band});
      }
    }
    if (!options.run_mc) continue;
    MCConfig mc = options.mc;
    mc.eps_grid = grid;
    mc.seed = options.mc.seed + 2 * static_cast<uint64_t>(k);
    absl::StatusOr<McCurve> add = McDeltaCurve(add_pair.p, add_pair.q, k, mc);
    if (!add.ok()) return add.status();
    mc.seed += 1;
    absl::StatusOr<McCurve> remove =
        McDeltaCurve(remove_pair.p, remove_pair.q, k, mc);
    if (!remove.ok()) return remove.status();
    result.mc_samples = add->samples;
    for (size_t i = 0; i < grid.size(); ++i) {
      result.rows.push_back({k, "mc", grid[i], add->points[i].delta,
                             remove->points[i].delta, add->accuracy});
    }
    if (k == 2) {
      for (size_t i = 0; i < grid.size(); ++i) {
        mc_add2.push_back(add->points[i].delta);
        mc_remove2.push_back(remove->points[i].delta);
      }
    }
  }

  if (!mc_add2.empty()) {
    const double acc = options.mc.accuracy;
    bool agrees = true;
    for (size_t i = 0; i < grid.size(); ++i) {
      const bool witness = grid[i] == result.crossing.eps_remove_above ||
                           grid[i] == result.crossing.eps_add_above;
      if (!witness) continue;
      const bool pld_remove_wins = remove2[i] > add2[i];
      const bool mc_remove_wins = mc_remove2[i] > mc_add2[i];
      agrees = agrees && pld_remove_wins == mc_remove_wins &&
               std::abs(mc_add2[i] - add2[i]) <= acc &&
               std::abs(mc_remove2[i] - remove2[i]) <= acc;
    }
    result.crossing.mc_agrees = agrees;
  }
  return result;
}

absl::StatusOr<Fig3Result> ExperimentFig3(const Fig3Options& options) {
  const std::vector<double> grid =
      options.eps_grid.empty() ? UniformGrid(0, 0.01, 131) : options.eps_grid;
  if (absl::Status s = CheckStrictlyIncreasing(grid); !s.ok()) return s;
  absl::StatusOr<Distribution> lo = Distribution::Laplace(-1, 2);
  if (!lo.ok()) return lo.status();
  absl::StatusOr<Distribution> hi = Distribution::Laplace(1, 2);
  if (!hi.ok()) return hi.status();
  absl::StatusOr<Distribution> p = Distribution::Mixture({0.5, 0.5}, {*lo, *hi});
  if (!p.ok()) return p.status();
  const Distribution& q = *lo;

  absl::StatusOr<DiscretePLD> l_pq = PldFromPairConnectTheDots(
      *p, q, options.step, options.tail_mass_bound);
  if (!l_pq.ok()) return l_pq.status();
  absl::StatusOr<DiscretePLD> l_qp = PldFromPairConnectTheDots(
      q, *p, options.step, options.tail_mass_bound);
  if (!l_qp.ok()) return l_qp.status();
  CompositionOptions compose;
  compose.tail_mass_bound = options.tail_mass_bound;
  absl::StatusOr<DiscretePLD> pp_qq = Compose(*l_pq, *l_pq, compose);
  if (!pp_qq.ok()) return pp_qq.status();
  absl::StatusOr<DiscretePLD> qq_pp = Compose(*l_qp, *l_qp, compose);
  if (!qq_pp.ok()) return qq_pp.status();
  absl::StatusOr<DiscretePLD> pq_qp = Compose(*l_pq, *l_qp, compose);
  if (!pq_qp.ok()) return pq_qp.status();

  const std::vector<double> curves[3] = {
      DeltaOf(*pp_qq, grid), DeltaOf(*qq_pp, grid), DeltaOf(*pq_qp, grid)};
  Fig3Result result;
  for (size_t i = 0; i < grid.size(); ++i) {
    result.rows.push_back(
        {grid[i], curves[0][i], curves[1][i], curves[2][i]});
  }
  for (int c = 0; c < 3; ++c) {
    Fig3Interval& best = result.intervals[c];
    size_t best_len = 0;
    size_t run_start = 0;
    size_t run_len = 0;
    double run_margin = 0;
    for (size_t i = 0; i <= grid.size(); ++i) {
      double margin = -1;
      if (i < grid.size()) {
        margin = std::numeric_limits<double>::infinity();
        for (int o = 0; o < 3; ++o) {
          if (o != c) margin = std::min(margin, curves[c][i] - curves[o][i]);
        }
      }
      if (margin > options.margin) {
        if (run_len == 0) {
          run_start = i;
          run_margin = 0;
        }
        ++run_len;
        run_margin = std::max(run_margin, margin);
        continue;
      }
      if (run_len > best_len) {
        best_len = run_len;
        best.lo = grid[run_start];
        best.hi = grid[run_start + run_len - 1];
        best.best_margin = run_margin;
      }
      run_len = 0;
    }
    best.found = best_len >= 2;
  }
  return result;
}

absl::StatusOr<Fig4Result> ExperimentFig4(const Fig4Options& options) {
  absl::StatusOr<MechanismSpec> mech = MechanismSpec::Gaussian(options.sigma);
  if (!mech.ok()) return mech.status();
  absl::StatusOr<SamplingScheme> scheme = SamplingScheme::Wor(options.gamma);
  if (!scheme.ok()) return scheme.status();
  std::vector<double> deltas = options.deltas;
  if (deltas.empty()) {
    for (int i = 0; i <= 24; ++i) deltas.push_back(std::pow(10.0, -9 + i / 4.0));
  }

  absl::StatusOr<PrivacyCurve> curve = SubstitutionWorLatticeCurve(
      *mech, options.gamma, options.step, options.tail_mass_bound);
  if (!curve.ok()) return curve.status();
  std::vector<double> grid;
  std::vector<double> input;
  for (const CurvePoint& pt : curve->points) {
    grid.push_back(pt.epsilon);
    input.push_back(pt.delta);
  }
  absl::StatusOr<DiscretePLD> single = PldFromDeltaCurve(grid, input);
  if (!single.ok()) return single.status();

  Fig4Result result;
  result.grid_points = static_cast<int64_t>(grid.size());
  const std::vector<double> round_trip = DeltaOf(*single, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    result.round_trip_error =
        std::max(result.round_trip_error, std::abs(round_trip[i] - input[i]));
  }

  CompositionOptions compose;
  compose.tail_mass_bound = options.tail_mass_bound;
  absl::StatusOr<DiscretePLD> upper = SelfCompose(*single, options.k, compose);
  if (!upper.ok()) return upper.status();
  const DominatingPair branch =
      PairSubstitutionWorBounds(*mech, options.gamma).alpha_ge_1;
  absl::StatusOr<DiscretePLD> lower_single = PldFromPairConnectTheDots(
      branch.p, branch.q, options.step, options.tail_mass_bound);
  if (!lower_single.ok()) return lower_single.status();
  absl::StatusOr<DiscretePLD> lower =
      SelfCompose(*lower_single, options.k, compose);
  if (!lower.ok()) return lower.status();
  absl::StatusOr<RdpProfile> rdp =
      SubsampledGaussianProfile(options.sigma / 2, options.gamma, options.k);
  if (!rdp.ok()) return rdp.status();

  for (double d : deltas) {
    absl::StatusOr<double> u = EpsilonOf(*upper, d);
    if (!u.ok()) return u.status();
    absl::StatusOr<double> l = EpsilonOf(*lower, d);
    if (!l.ok()) return l.status();
    absl::StatusOr<double> r = RdpToDp(*rdp, d);
    if (!r.ok()) return r.status();
    result.rows.push_back({d, std::max(0.0, *u), std::max(0.0, *l), *r});
  }
  return result;
}

absl::StatusOr<std::vector<ConjectureCell>> ConjectureSweep(
    const ConjectureOptions& options) {
  const std::vector<double> grid =
      options.eps_grid.empty() ? UniformGrid(0, 0.1, 101) : options.eps_grid;
  if (absl::Status s = CheckStrictlyIncreasing(grid); !s.ok()) return s;
  std::vector<ConjectureCell> cells;
  for (double sigma : options.sigmas) {
    for (double gamma : options.gammas) {
      for (int64_t k : options.ks) {
        cells.push_back({sigma, gamma, k, 0, 0, 0, false});
      }
    }
  }
  std::vector<absl::Status> status(cells.size());
  kernels::ParallelFor(static_cast<int64_t>(cells.size()), [&](int64_t i) {
    ConjectureCell& cell = cells[i];
    AccountantConfig cfg;
    cfg.mech = MechanismSpec{NoiseKind::kGaussian, cell.sigma};
    cfg.scheme = SamplingScheme{SchemeKind::kPoisson, cell.gamma};
    cfg.relation = Relation::kAddRemove;
    cfg.k = cell.k;
    cfg.step = options.step;
    cfg.tail_mass_bound = options.tail_mass_bound;
    absl::StatusOr<Accountant> acc = Accountant::Create(cfg);
    if (!acc.ok()) {
      status[i] = acc.status();
      return;
    }
    const DiscretePLD& add = acc->directions()[0].pld;
    const DiscretePLD& remove = acc->directions()[1].pld;
    const double shift = static_cast<double>(cell.k) * options.step;
    cell.worst_margin = std::numeric_limits<double>::infinity();
    cell.raw_margin = std::numeric_limits<double>::infinity();
    for (double eps : grid) {
      const double r = DeltaOf(remove, eps);
      const double margin = r - DeltaOf(add, eps + shift);
      if (margin < cell.worst_margin) {
        cell.worst_margin = margin;
        cell.witness_eps = eps;
      }
      cell.raw_margin = std::min(cell.raw_margin, r - DeltaOf(add, eps));
    }
    cell.passed = cell.worst_margin >= -options.tolerance;
  });
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return cells;
}

absl::StatusOr<FactorTwoCase> FactorTwo(double sigma, double gamma,
                                        double epsilon,
                                        const FactorTwoOptions& options) {
  AccountantConfig cfg;
  absl::StatusOr<MechanismSpec> mech =
      MechanismSpec::Gaussian(sigma * (1 + options.offset));
  if (!mech.ok()) return mech.status();
  absl::StatusOr<SamplingScheme> scheme = SamplingScheme::Poisson(gamma);
  if (!scheme.ok()) return scheme.status();
  cfg.mech = *mech;
  cfg.scheme = *scheme;
  cfg.relation = Relation::kAddRemove;
  cfg.step = options.step;
  cfg.tail_mass_bound = options.tail_mass_bound;

  FactorTwoCase out{sigma, gamma, epsilon, 0, 0, 0, 0, 0};
  for (int64_t k = 1; k <= options.max_k; k *= 4) {
    cfg.k = k;
    absl::StatusOr<double> delta = DeltaFor(cfg, epsilon);
    if (!delta.ok()) return delta.status();
    if (*delta >= options.min_delta) {
      out.k = k;
      out.delta = *delta;
      break;
    }
  }
  if (out.k == 0) {
    return absl::OutOfRangeError(absl::StrFormat(
        "delta stays below %g up to k = %d", options.min_delta,
        options.max_k));
  }
  if (!(out.delta < 1)) {
    return absl::OutOfRangeError("delta reaches 1 at the smallest k");
  }

  cfg.mech = cfg.mech.WithParameter(1.0);
  absl::StatusOr<double> poisson =
      SigmaFor(cfg, epsilon, out.delta, options.sigma);
  if (!poisson.ok()) return poisson.status();
  cfg.scheme.kind = SchemeKind::kWor;
  absl::StatusOr<double> wor = SigmaFor(cfg, epsilon, out.delta, options.sigma);
  if (!wor.ok()) return wor.status();
  out.sigma_poisson = *poisson;
  out.sigma_wor = *wor;
  out.ratio = *wor / *poisson;
  return out;
}

}  // namespace dpacct
