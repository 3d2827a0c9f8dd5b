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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "boost/multiprecision/cpp_bin_float.hpp"
#include "dpacct/accountant.h"
#include "dpacct/divergence.h"
#include "dpacct/experiments.h"
#include "dpacct/monte_carlo.h"
#include "dpacct/pld.h"
#include "oracles.h"

namespace dpacct {
namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Verdict RrOracleCheck() {
  const auto start = Clock::now();
  absl::StatusOr<RrOracleResult> r = RrOracle();
  const double t = Seconds(start);
  if (!r.ok()) return {false, r.status().ToString()};
  const bool exact = r->h43_pq == Rational(11, 48) &&
                     r->h43_qp == Rational(1, 6) &&
                     r->h2_pq == Rational(1, 16) && r->h2_qp == Rational(1, 8);
  return {exact && r->order_flips && t < 1.0,
          absl::StrFormat("%s; order flips: %s; %.3fs", FormatRrOracle(*r),
                          r->order_flips ? "yes" : "no", t)};
}

Verdict Table1Check() {
  const auto start = Clock::now();
  const std::vector<double> deltas = {1e-7, 1e-6, 1e-5, 1e-4};
  const std::vector<double> poisson = {1.19, 0.96, 0.80, 0.64};
  const std::vector<double> wor = {17.48, 15.26, 12.98, 10.62};
  bool pass = true;
  std::string detail;
  for (SchemeKind scheme : {SchemeKind::kPoisson, SchemeKind::kWor}) {
    AccountantConfig cfg;
    cfg.mech = MechanismSpec{NoiseKind::kGaussian, 0.8};
    cfg.scheme = SamplingScheme{scheme, 0.001};
    cfg.k = 10000;
    cfg.step = 1e-4;
    absl::StatusOr<Accountant> acct = Accountant::Create(cfg);
    if (!acct.ok()) return {false, acct.status().ToString()};
    const std::vector<double>& want =
        scheme == SchemeKind::kPoisson ? poisson : wor;
    detail += std::string(SchemeName(scheme)) + ":";
    for (size_t i = 0; i < deltas.size(); ++i) {
      absl::StatusOr<double> eps = acct->EpsilonFor(deltas[i]);
      if (!eps.ok()) return {false, eps.status().ToString()};
      const double rel = std::abs(*eps / want[i] - 1);
      pass = pass && rel <= 0.03;
      detail += absl::StrFormat(" %.4g(%+.1f%%)", *eps,
                                100 * (*eps / want[i] - 1));
    }
    detail += "; ";
  }
  const double t = Seconds(start);
  pass = pass && t < 60;
  return {pass, detail + absl::StrFormat("%.1fs", t)};
}

Verdict FactorTwoCheck() {
  FactorTwoOptions options;
  options.step = 1e-3;
  const double bound = 2 * options.sigma.relative_tolerance;
  bool pass = true;
  double worst = 0;
  int n = 0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (double gamma : {0.01, 0.1}) {
      for (double eps : {1.0, 5.0}) {
        absl::StatusOr<FactorTwoCase> c = FactorTwo(sigma, gamma, eps, options);
        if (!c.ok()) {
          return {false, absl::StrFormat("sigma=%g gamma=%g eps=%g: %s", sigma,
                                         gamma, eps, c.status().ToString())};
        }
        const double dev = std::abs(c->ratio / 2 - 1);
        worst = std::max(worst, dev);
        pass = pass && dev <= bound;
        ++n;
      }
    }
  }
  return {pass, absl::StrFormat("%d configs, max |ratio/2 - 1| = %.2e (bound "
                                "%.0e)",
                                n, worst, bound)};
}

Verdict GaussianOracleCheck() {
  double worst_excess = -INFINITY;
  bool pass = true;
  for (double sigma : {0.5, 1.0, 4.0}) {
    AccountantConfig cfg;
    cfg.mech = MechanismSpec{NoiseKind::kGaussian, sigma};
    cfg.scheme = SamplingScheme{SchemeKind::kPoisson, 1.0};
    cfg.relation = Relation::kAdd;
    absl::StatusOr<Accountant> acct = Accountant::Create(cfg);
    if (!acct.ok()) return {false, acct.status().ToString()};
    for (int j = 0; j < 20; ++j) {
      const double eps = 0.15 * j;
      const double truth = testing::GaussianShiftDeltaQuadrature(sigma, eps);
      const double slack =
          testing::GaussianShiftDeltaQuadrature(sigma, eps - cfg.step) - truth;
      const double err = std::abs(acct->DeltaFor(eps) - truth);
      worst_excess = std::max(worst_excess, err - slack);
      pass = pass && err <= 1e-6 + slack;
    }
  }
  return {pass, absl::StrFormat("60 points, max(|err| - slack) = %.2e",
                                worst_excess)};
}

Verdict Fig1Check() {
  const auto start = Clock::now();
  Fig1Options options;
  options.k_list = {1, 2};
  options.run_mc = false;
  absl::StatusOr<Fig1Result> det = ExperimentFig1(options);
  const double t_det = Seconds(start);
  if (!det.ok()) return {false, det.status().ToString()};
  options.gammas = {det->gamma};
  options.run_mc = true;
  absl::StatusOr<Fig1Result> full = ExperimentFig1(options);
  if (!full.ok()) return {false, full.status().ToString()};
  const Fig1Crossing& c = full->crossing;
  const bool pass = c.found && c.remove_gap > 10 * c.slack &&
                    c.add_gap > 10 * c.slack && c.mc_agrees && t_det < 30;
  return {pass,
          absl::StrFormat("gamma=%g remove>add at eps=%g (gap %.3g), add>remove "
                          "at eps=%g (gap %.3g), slack %.2g; mc N=%d agrees: %s; "
                          "deterministic %.1fs",
                          full->gamma, c.eps_remove_above, c.remove_gap,
                          c.eps_add_above, c.add_gap, c.slack,
                          full->mc_samples, c.mc_agrees ? "yes" : "no", t_det)};
}

Verdict Fig3Check() {
  const auto start = Clock::now();
  absl::StatusOr<Fig3Result> r = ExperimentFig3(Fig3Options{});
  const double t = Seconds(start);
  if (!r.ok()) return {false, r.status().ToString()};
  bool pass = t < 60;
  std::string detail;
  const char* names[] = {"PP||QQ", "QQ||PP", "PQ||QP"};
  for (int i = 0; i < 3; ++i) {
    const Fig3Interval& in = r->intervals[i];
    pass = pass && in.found && in.best_margin > 1e-6;
    detail += absl::StrFormat("%s [%g, %g] margin %.3g; ", names[i], in.lo,
                              in.hi, in.best_margin);
  }
  return {pass, detail + absl::StrFormat("%.1fs", t)};
}

Verdict Fig4Check() {
  absl::StatusOr<Fig4Result> r = ExperimentFig4(Fig4Options{});
  if (!r.ok()) return {false, r.status().ToString()};
  bool ordered = true;
  const Fig4Row* at_1e6 = nullptr;
  for (const Fig4Row& row : r->rows) {
    ordered = ordered && row.upper >= row.lower;
    if (std::abs(std::log10(row.delta) + 6) < 1e-9) at_1e6 = &row;
  }
  if (at_1e6 == nullptr) return {false, "delta = 1e-6 not queried"};
  const bool pass = ordered && r->round_trip_error <= 1e-12 &&
                    at_1e6->rdp > at_1e6->lower;
  return {pass, absl::StrFormat("%d deltas, upper >= lower: %s; round trip "
                                "%.2e over %d points; at 1e-6 upper %.4g "
                                "lower %.4g rdp %.4g",
                                r->rows.size(), ordered ? "yes" : "no",
                                r->round_trip_error, r->grid_points,
                                at_1e6->upper, at_1e6->lower, at_1e6->rdp)};
}

Verdict HoeffdingCheck() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big a("0.001"), beta("0.01");
  const Big n = ceil(log(Big(2) * 40 / beta) / (Big(2) * a * a));
  const int64_t oracle = n.convert_to<int64_t>();
  const int64_t got = HoeffdingSamples(0.001, 0.01, 40);
  constexpr int64_t kStated = 4'493'601;
  return {got == oracle && got == kStated,
          absl::StrFormat("hoeffding_samples = %d, 50-digit oracle = %d, "
                          "required literal = %d",
                          got, oracle, kStated)};
}

// Random rational law over n labels.
Distribution RandomDiscrete(int n, std::mt19937_64& rng) {
  std::vector<int64_t> counts(n, 0);
  for (int i = 0; i < 97; ++i) ++counts[rng() % n];
  std::vector<double> labels;
  std::vector<Rational> probs;
  for (int i = 0; i < n; ++i) {
    labels.push_back(i);
    probs.push_back(Rational(counts[i], 97));
  }
  return *Distribution::Discrete(labels, probs);
}

Verdict PropertyCheck() {
  const auto start = Clock::now();
  std::string detail;
  bool pass = true;

  // Mass conservation and domination of the true curve.
  const Distribution lap0 = *Distribution::Laplace(0, 1);
  const Distribution mix =
      *Distribution::Mixture({0.8, 0.2}, {lap0, *Distribution::Laplace(1, 1)});
  const Distribution g0 = *Distribution::Gaussian(0, 0.7);
  const Distribution g1 = *Distribution::Gaussian(1, 0.7);
  double worst_mass = 0;
  double worst_dom = INFINITY;
  for (const auto& [p, q] : {std::pair{mix, lap0}, std::pair{lap0, mix},
                             std::pair{g0, g1}}) {
    for (Discretization d :
         {Discretization::kBucket, Discretization::kConnectTheDots}) {
      absl::StatusOr<DiscretePLD> pld =
          PldForPair(p, q, d, 1e-3, kDefaultTailMassBound);
      if (!pld.ok()) return {false, pld.status().ToString()};
      absl::StatusOr<DiscretePLD> two = SelfCompose(*pld, 2);
      if (!two.ok()) return {false, two.status().ToString()};
      for (const DiscretePLD* x : {&*pld, &*two}) {
        worst_mass = std::max(worst_mass,
                              std::abs(x->TotalMass() + x->mass_inf - 1));
      }
      for (int j = 0; j <= 40; ++j) {
        const double eps = 0.05 * j;
        absl::StatusOr<double> truth = HockeyStick(p, q, std::exp(eps));
        if (!truth.ok()) return {false, truth.status().ToString()};
        worst_dom = std::min(worst_dom, DeltaOf(*pld, eps) - *truth);
      }
    }
  }
  pass = pass && worst_mass <= 1e-12 && worst_dom >= -1e-12;
  detail += absl::StrFormat("mass error %.1e, min(pld - true) %.1e; ",
                            worst_mass, worst_dom);

  // Post-processing on random discrete instances.
  std::mt19937_64 rng(7);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const Distribution p = RandomDiscrete(n, rng);
    const Distribution q = RandomDiscrete(n, rng);
    std::vector<double> relabel(n);
    const int m = 1 + static_cast<int>(rng() % n);
    for (double& l : relabel) l = static_cast<double>(rng() % m);
    const Rational alpha(static_cast<int64_t>(rng() % 50), 10);
    absl::StatusOr<Rational> before = HockeyStickDiscrete(p, q, alpha);
    absl::StatusOr<Distribution> fp = PushForward(p, relabel);
    absl::StatusOr<Distribution> fq = PushForward(q, relabel);
    if (!before.ok() || !fp.ok() || !fq.ok()) return {false, "post-processing"};
    absl::StatusOr<Rational> after = HockeyStickDiscrete(*fp, *fq, alpha);
    if (!after.ok()) return {false, after.status().ToString()};
    if (*after > *before) ++violations;
  }
  pass = pass && violations == 0;
  detail += absl::StrFormat("post-processing violations %d/100; ", violations);

  // Remove dominates add over the Gaussian grid.
  absl::StatusOr<std::vector<ConjectureCell>> cells =
      ConjectureSweep(ConjectureOptions{});
  if (!cells.ok()) return {false, cells.status().ToString()};
  int failed = 0;
  double worst = INFINITY;
  for (const ConjectureCell& c : *cells) {
    failed += c.passed ? 0 : 1;
    worst = std::min(worst, c.worst_margin);
  }
  pass = pass && failed == 0;
  const double t = Seconds(start);
  detail += absl::StrFormat("remove >= add in %d/%d cells (min margin %.1e); "
                            "%.1fs",
                            cells->size() - failed, cells->size(), worst, t);
  return {pass, detail};
}

int Main() {
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> checks =
      {
          {"randomized-response oracle", RrOracleCheck},
          {"Table 1 epsilons", Table1Check},
          {"WOR/Poisson noise ratio", FactorTwoCheck},
          {"Gaussian quadrature oracle", GaussianOracleCheck},
          {"add/remove crossing", Fig1Check},
          {"three-pair substitution", Fig3Check},
          {"connect-the-dots bound", Fig4Check},
          {"Hoeffding sample count", HoeffdingCheck},
          {"property suites", PropertyCheck},
      };
  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const Verdict v = checks[i].second();
    failures += v.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu passed in %.1fs\n", static_cast<int>(checks.size()) -
                                              failures,
              checks.size(), Seconds(start));
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dpacct

int main() { return dpacct::Main(); }
