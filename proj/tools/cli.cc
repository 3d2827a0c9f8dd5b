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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpacct/accountant.h"
#include "dpacct/experiments.h"
#include "dpacct/kernels.h"
#include "dpacct/monte_carlo.h"
#include "dpacct/pairs.h"
#include "dpacct/pld.h"
#include "dpacct/rdp.h"
#include "dpacct/version.h"
#include "json.hpp"

namespace dpacct::cli {
namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<double, int64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Result of one command: the table plus run facts for the manifest.
struct Output {
  Table table;
  Json summary = Json::object();
  uint64_t seed = 0;
  // Set when the command ran but its check failed (exit code 1).
  std::string failure;
  // Printed instead of the CSV table when non-empty.
  std::string text;
};

std::string CellText(const Cell& c) {
  struct Visitor {
    std::string operator()(double x) const { return FormatDouble(x); }
    std::string operator()(int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
      }
      return quoted + "\"";
    }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

Json CellJson(const Cell& c) {
  return std::visit([](const auto& v) { return Json(v); }, c);
}

std::string RenderCsv(const Table& t) {
  std::string s;
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) s += ',';
    s += t.columns[i];
  }
  s += '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += CellText(row[i]);
    }
    s += '\n';
  }
  return s;
}

std::string RenderJson(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = CellJson(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

// Flags shared by every command.
struct IoFlags {
  std::string out;
  std::string manifest;
  bool json = false;
};

void AddIoFlags(CLI::App* app, IoFlags* f) {
  app->add_option("--out", f->out, "Write the table here instead of stdout");
  app->add_option("--manifest", f->manifest,
                  "Run manifest path (default: <out>.manifest.json, or " +
                      std::string(kDefaultManifest) + ")");
  app->add_flag("--json", f->json, "Emit a JSON array instead of CSV");
}

struct AccountingFlags {
  std::string noise = "gaussian";
  double parameter = 1.0;
  std::string scheme = "poisson";
  double gamma = 1.0;
  std::string relation = "add-remove";
  int64_t k = 1;
  double step = kDefaultStep;
  double tail = kDefaultTailMassBound;
  std::string discretization = "connect-the-dots";
};

void AddAccountingFlags(CLI::App* app, AccountingFlags* f) {
  app->add_option("--noise", f->noise, "gaussian | laplace")
      ->check(CLI::IsMember({"gaussian", "laplace"}, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--sigma,--scale", f->parameter,
                  "Gaussian noise multiplier or Laplace scale")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--scheme", f->scheme, "poisson | wor")
      ->check(CLI::IsMember({"poisson", "wor"}, CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--gamma", f->gamma, "Sampling rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--relation", f->relation,
                  "add | remove | add-remove | substitution")
      ->check(CLI::IsMember({"add", "remove", "add-remove", "substitution"},
                            CLI::ignore_case))
      ->capture_default_str();
  app->add_option("--k", f->k, "Number of compositions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--step", f->step, "Loss lattice step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--tail", f->tail, "Tail mass bound")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--discretization", f->discretization,
                  "connect-the-dots | bucket")
      ->check(CLI::IsMember({"connect-the-dots", "ctd", "bucket"},
                            CLI::ignore_case))
      ->capture_default_str();
}

absl::StatusOr<AccountantConfig> ToConfig(const AccountingFlags& f) {
  AccountantConfig cfg;
  absl::StatusOr<NoiseKind> noise = ParseNoise(f.noise);
  if (!noise.ok()) return noise.status();
  absl::StatusOr<SchemeKind> scheme = ParseScheme(f.scheme);
  if (!scheme.ok()) return scheme.status();
  absl::StatusOr<Relation> relation = ParseRelation(f.relation);
  if (!relation.ok()) return relation.status();
  absl::StatusOr<Discretization> d = ParseDiscretization(f.discretization);
  if (!d.ok()) return d.status();
  cfg.mech = MechanismSpec{*noise, f.parameter};
  cfg.scheme = SamplingScheme{*scheme, f.gamma};
  cfg.relation = *relation;
  cfg.k = f.k;
  cfg.step = f.step;
  cfg.tail_mass_bound = f.tail;
  cfg.discretization = *d;
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;
  return cfg;
}

// Index of the largest entry; the first one on ties.
size_t ArgMax(const std::vector<double>& v) {
  return static_cast<size_t>(std::max_element(v.begin(), v.end()) -
                             v.begin());
}

void NoteUpperBound(const Accountant& acc, std::ostream& err) {
  if (!acc.tight()) err << "note: upper bound (not tight)\n";
}

// ---------------------------------------------------------------------------
// Commands.

struct DeltaFlags {
  AccountingFlags acc;
  std::vector<double> eps;
  bool by_direction = false;
};

absl::StatusOr<Output> CmdDelta(const DeltaFlags& f, std::ostream& err) {
  absl::StatusOr<AccountantConfig> cfg = ToConfig(f.acc);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<Accountant> acc = Accountant::Create(*cfg);
  if (!acc.ok()) return acc.status();
  NoteUpperBound(*acc, err);
  Output o;
  o.table.columns = {"epsilon", "delta", "direction", "tight"};
  for (double eps : f.eps) {
    const std::vector<double> deltas = acc->DeltaByDirection(eps);
    if (f.by_direction) {
      for (size_t i = 0; i < deltas.size(); ++i) {
        const DirectionalPld& d = acc->directions()[i];
        o.table.rows.push_back({eps, deltas[i], d.direction, d.tight});
      }
      continue;
    }
    const size_t best = ArgMax(deltas);
    o.table.rows.push_back({eps, deltas[best],
                            acc->directions()[best].direction, acc->tight()});
  }
  return o;
}

struct EpsilonFlags {
  AccountingFlags acc;
  std::vector<double> delta;
  bool by_direction = false;
};

absl::StatusOr<Output> CmdEpsilon(const EpsilonFlags& f, std::ostream& err) {
  absl::StatusOr<AccountantConfig> cfg = ToConfig(f.acc);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<Accountant> acc = Accountant::Create(*cfg);
  if (!acc.ok()) return acc.status();
  NoteUpperBound(*acc, err);
  Output o;
  o.table.columns = {"epsilon", "delta", "direction", "tight"};
  for (double delta : f.delta) {
    absl::StatusOr<std::vector<double>> eps = acc->EpsilonByDirection(delta);
    if (!eps.ok()) return eps.status();
    if (f.by_direction) {
      for (size_t i = 0; i < eps->size(); ++i) {
        const DirectionalPld& d = acc->directions()[i];
        o.table.rows.push_back({(*eps)[i], delta, d.direction, d.tight});
      }
      continue;
    }
    const size_t best = ArgMax(*eps);
    o.table.rows.push_back({(*eps)[best], delta,
                            acc->directions()[best].direction, acc->tight()});
  }
  return o;
}

struct CalibrateFlags {
  AccountingFlags acc;
  bool table1 = false;
  double epsilon = 1.0;
  double delta = 1e-6;
  double tolerance = kDefaultSigmaTolerance;
};

absl::StatusOr<Output> CmdCalibrate(const CalibrateFlags& f, std::ostream&) {
  Output o;
  if (f.table1) {
    // The DP-SGD setting contrasted across sampling schemes.
    o.table.columns = {"scheme", "sigma", "gamma", "k", "delta", "epsilon"};
    for (SchemeKind scheme : {SchemeKind::kPoisson, SchemeKind::kWor}) {
      AccountantConfig cfg;
      cfg.mech = MechanismSpec{NoiseKind::kGaussian, 0.8};
      cfg.scheme = SamplingScheme{scheme, 0.001};
      cfg.relation = Relation::kAddRemove;
      cfg.k = 10000;
      cfg.step = f.acc.step;
      cfg.tail_mass_bound = f.acc.tail;
      absl::StatusOr<Accountant> acc = Accountant::Create(cfg);
      if (!acc.ok()) return acc.status();
      for (double delta : {1e-7, 1e-6, 1e-5, 1e-4}) {
        absl::StatusOr<double> eps = acc->EpsilonFor(delta);
        if (!eps.ok()) return eps.status();
        o.table.rows.push_back({std::string(SchemeName(scheme)), 0.8, 0.001,
                                int64_t{10000}, delta, *eps});
      }
    }
    return o;
  }
  absl::StatusOr<AccountantConfig> cfg = ToConfig(f.acc);
  if (!cfg.ok()) return cfg.status();
  SigmaOptions options;
  options.relative_tolerance = f.tolerance;
  absl::StatusOr<double> sigma = SigmaFor(*cfg, f.epsilon, f.delta, options);
  if (!sigma.ok()) return sigma.status();
  o.table.columns = {"noise", "scheme", "relation", "gamma", "k",
                     "epsilon", "delta", "sigma"};
  o.table.rows.push_back({std::string(NoiseName(cfg->mech.noise)),
                          std::string(SchemeName(cfg->scheme.kind)),
                          std::string(RelationName(cfg->relation)),
                          cfg->scheme.gamma, cfg->k, f.epsilon, f.delta,
                          *sigma});
  return o;
}

struct SweepFlags {
  bool figure2 = false;
  std::vector<double> gammas = DefaultFigure2Gammas();
  std::vector<double> poisson_eps = {1, 2, 5, 10};
  std::vector<double> wor_eps = {10};
  double delta = 1e-6;
  int64_t k = 10000;
  double step = kDefaultStep;
  double tail = kDefaultTailMassBound;
  double tolerance = kDefaultSigmaTolerance;
};

absl::StatusOr<Output> CmdSweep(const SweepFlags& f, std::ostream&) {
  Figure2Options options;
  options.gammas = f.gammas;
  options.poisson_eps = f.poisson_eps;
  options.wor_eps = f.wor_eps;
  options.delta = f.delta;
  options.k = f.k;
  options.step = f.step;
  options.tail_mass_bound = f.tail;
  options.sigma.relative_tolerance = f.tolerance;
  absl::StatusOr<std::vector<Figure2Row>> rows = SweepFigure2(options);
  if (!rows.ok()) return rows.status();
  Output o;
  o.table.columns = {"scheme", "epsilon", "gamma", "sigma"};
  for (const Figure2Row& r : *rows) {
    o.table.rows.push_back(
        {std::string(SchemeName(r.scheme)), r.epsilon, r.gamma, r.sigma});
  }
  return o;
}

struct McFlags {
  AccountingFlags acc;
  std::vector<double> eps = DefaultFig1EpsGrid();
  double accuracy = 0.001;
  double confidence = 0.01;
  uint64_t seed = 0;
  int64_t samples = 0;
};

absl::StatusOr<Output> CmdMc(const McFlags& f, std::ostream&) {
  absl::StatusOr<AccountantConfig> cfg = ToConfig(f.acc);
  if (!cfg.ok()) return cfg.status();
  if (cfg->relation != Relation::kAdd && cfg->relation != Relation::kRemove) {
    return absl::InvalidArgumentError(
        "mc samples one direction: use --relation add or remove");
  }
  const DominatingPair pair = cfg->relation == Relation::kAdd
                                  ? PairAdd(cfg->mech, cfg->scheme)
                                  : PairRemove(cfg->mech, cfg->scheme);
  if (cfg->k > (int64_t{1} << 30)) {
    return absl::InvalidArgumentError("mc composition count too large");
  }
  MCConfig mc;
  mc.accuracy = f.accuracy;
  mc.confidence = f.confidence;
  mc.eps_grid = f.eps;
  mc.seed = f.seed;
  mc.samples = f.samples;
  absl::StatusOr<McCurve> curve =
      McDeltaCurve(pair.p, pair.q, static_cast<int>(cfg->k), mc);
  if (!curve.ok()) return curve.status();
  Output o;
  o.seed = f.seed;
  o.summary["samples"] = curve->samples;
  o.table.columns = {"epsilon", "delta", "lower", "upper"};
  for (const McCurvePoint& p : curve->points) {
    o.table.rows.push_back({p.epsilon, p.delta, p.lower, p.upper});
  }
  return o;
}

absl::StatusOr<Output> CmdHoeffding(double accuracy, double confidence,
                                    int64_t grid_size) {
  MCConfig cfg;
  cfg.accuracy = accuracy;
  cfg.confidence = confidence;
  cfg.eps_grid.assign(static_cast<size_t>(grid_size), 0.0);
  if (absl::Status s = ValidateMcConfig(cfg); !s.ok()) return s;
  Output o;
  o.table.columns = {"accuracy", "confidence", "grid_size", "samples"};
  o.table.rows.push_back({accuracy, confidence, grid_size,
                          HoeffdingSamples(accuracy, confidence, grid_size)});
  return o;
}

absl::StatusOr<Output> CmdRrOracle() {
  absl::StatusOr<RrOracleResult> r = RrOracle();
  if (!r.ok()) return r.status();
  Output o;
  o.table.columns = {"quantity", "value"};
  o.table.rows = {{std::string("H_{4/3}(P||Q)"), r->h43_pq.ToString()},
                  {std::string("H_{4/3}(Q||P)"), r->h43_qp.ToString()},
                  {std::string("H_2(P||Q)"), r->h2_pq.ToString()},
                  {std::string("H_2(Q||P)"), r->h2_qp.ToString()}};
  o.summary["line"] = FormatRrOracle(*r);
  o.summary["order_flips"] = r->order_flips;
  if (!r->order_flips) o.failure = "divergence order does not flip";
  o.text = FormatRrOracle(*r) + "\n";
  return o;
}

struct Fig1Flags {
  double scale = 1.0;
  std::vector<double> gammas = {0.2, 0.3, 0.4, 0.5};
  std::vector<int> k_list = {1, 2, 16};
  std::vector<double> eps = DefaultFig1EpsGrid();
  double step = 1e-5;
  bool no_mc = false;
  double accuracy = 0.001;
  double confidence = 0.01;
  uint64_t seed = 0;
};

absl::StatusOr<Output> CmdFig1(const Fig1Flags& f, std::ostream&) {
  Fig1Options options;
  options.scale = f.scale;
  options.gammas = f.gammas;
  options.k_list = f.k_list;
  options.eps_grid = f.eps;
  options.step = f.step;
  options.run_mc = !f.no_mc;
  options.mc.accuracy = f.accuracy;
  options.mc.confidence = f.confidence;
  options.mc.seed = f.seed;
  absl::StatusOr<Fig1Result> r = ExperimentFig1(options);
  if (!r.ok()) return r.status();
  Output o;
  o.seed = f.seed;
  o.table.columns = {"k", "method", "epsilon", "add", "remove", "band"};
  for (const Fig1Row& row : r->rows) {
    o.table.rows.push_back({int64_t{row.k}, row.method, row.epsilon, row.add,
                            row.remove, row.band});
  }
  const Fig1Crossing& c = r->crossing;
  o.summary = Json{{"gamma", r->gamma},
                   {"crossing_found", c.found},
                   {"eps_remove_above", c.eps_remove_above},
                   {"remove_gap", c.remove_gap},
                   {"eps_add_above", c.eps_add_above},
                   {"add_gap", c.add_gap},
                   {"slack", c.slack},
                   {"mc_agrees", c.mc_agrees},
                   {"mc_samples", r->mc_samples}};
  if (!c.found) o.failure = "no resolvable add/remove crossing at k = 2";
  return o;
}

struct Fig3Flags {
  std::vector<double> eps;
  double step = kDefaultStep;
};

absl::StatusOr<Output> CmdFig3(const Fig3Flags& f, std::ostream&) {
  Fig3Options options;
  options.eps_grid = f.eps;
  options.step = f.step;
  absl::StatusOr<Fig3Result> r = ExperimentFig3(options);
  if (!r.ok()) return r.status();
  Output o;
  o.table.columns = {"epsilon", "pp_qq", "qq_pp", "pq_qp"};
  for (const Fig3Row& row : r->rows) {
    o.table.rows.push_back({row.epsilon, row.pp_qq, row.qq_pp, row.pq_qp});
  }
  const char* names[3] = {"pp_qq", "qq_pp", "pq_qp"};
  for (int c = 0; c < 3; ++c) {
    const Fig3Interval& iv = r->intervals[c];
    o.summary[names[c]] = Json{{"found", iv.found},
                               {"lo", iv.lo},
                               {"hi", iv.hi},
                               {"margin", iv.best_margin}};
    if (!iv.found) o.failure = absl::StrCat(names[c], " is never the maximum");
  }
  return o;
}

struct Fig4Flags {
  double sigma = 4.0;
  double gamma = 0.05;
  int64_t k = 1000;
  std::vector<double> deltas;
  double step = kDefaultStep;
};

absl::StatusOr<Output> CmdFig4(const Fig4Flags& f, std::ostream& err) {
  Fig4Options options;
  options.sigma = f.sigma;
  options.gamma = f.gamma;
  options.k = f.k;
  options.deltas = f.deltas;
  options.step = f.step;
  absl::StatusOr<Fig4Result> r = ExperimentFig4(options);
  if (!r.ok()) return r.status();
  err << "note: upper bound (not tight)\n";
  Output o;
  o.table.columns = {"delta", "upper", "lower", "rdp"};
  for (const Fig4Row& row : r->rows) {
    o.table.rows.push_back({row.delta, row.upper, row.lower, row.rdp});
  }
  o.summary = Json{{"upper", "upper bound (not tight)"},
                   {"round_trip_error", r->round_trip_error},
                   {"grid_points", r->grid_points}};
  return o;
}

struct ConjectureFlags {
  std::vector<double> sigmas = {0.5, 1, 2, 4};
  std::vector<double> gammas = {0.01, 0.1, 0.5};
  std::vector<int64_t> ks = {1, 2, 16, 256};
  std::vector<double> eps;
  double step = 1e-3;
};

absl::StatusOr<Output> CmdConjecture(const ConjectureFlags& f,
                                     std::ostream& err) {
  ConjectureOptions options;
  options.sigmas = f.sigmas;
  options.gammas = f.gammas;
  options.ks = f.ks;
  options.eps_grid = f.eps;
  options.step = f.step;
  absl::StatusOr<std::vector<ConjectureCell>> cells = ConjectureSweep(options);
  if (!cells.ok()) return cells.status();
  Output o;
  o.table.columns = {"sigma",      "gamma",       "k",     "worst_margin",
                     "witness_eps", "raw_margin", "passed"};
  int64_t failed = 0;
  for (const ConjectureCell& c : *cells) {
    o.table.rows.push_back({c.sigma, c.gamma, c.k, c.worst_margin,
                            c.witness_eps, c.raw_margin, c.passed});
    if (!c.passed) {
      ++failed;
      err << "violation: sigma=" << FormatDouble(c.sigma)
          << " gamma=" << FormatDouble(c.gamma) << " k=" << c.k
          << " eps=" << FormatDouble(c.witness_eps)
          << " margin=" << FormatDouble(c.worst_margin) << "\n";
    }
  }
  o.summary["cells"] = static_cast<int64_t>(cells->size());
  o.summary["violations"] = failed;
  if (failed > 0) o.failure = absl::StrCat(failed, " grid cells violate");
  return o;
}

struct FactorTwoFlags {
  std::vector<double> sigmas = {0.5, 1, 2};
  std::vector<double> gammas = {0.01, 0.1};
  std::vector<double> eps = {1, 5};
  double step = 1e-3;
  double tolerance = kDefaultSigmaTolerance;
};

absl::StatusOr<Output> CmdFactorTwo(const FactorTwoFlags& f, std::ostream&) {
  FactorTwoOptions options;
  options.step = f.step;
  options.sigma.relative_tolerance = f.tolerance;
  Output o;
  o.table.columns = {"sigma", "gamma", "epsilon", "k", "delta",
                     "sigma_poisson", "sigma_wor", "ratio"};
  for (double s : f.sigmas) {
    for (double g : f.gammas) {
      for (double e : f.eps) {
        absl::StatusOr<FactorTwoCase> c = FactorTwo(s, g, e, options);
        if (!c.ok()) return c.status();
        o.table.rows.push_back({c->sigma, c->gamma, c->epsilon, c->k,
                                c->delta, c->sigma_poisson, c->sigma_wor,
                                c->ratio});
      }
    }
  }
  return o;
}

struct PldBuildFlags {
  AccountingFlags acc;
  std::string direction;
  std::string pld_out;
};

absl::StatusOr<Output> CmdPldBuild(const PldBuildFlags& f, std::ostream&) {
  absl::StatusOr<AccountantConfig> cfg = ToConfig(f.acc);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<Accountant> acc = Accountant::Create(*cfg);
  if (!acc.ok()) return acc.status();
  const DirectionalPld* chosen = nullptr;
  for (const DirectionalPld& d : acc->directions()) {
    if (f.direction.empty() || d.direction == f.direction) {
      chosen = &d;
      break;
    }
  }
  if (chosen == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("no direction '", f.direction, "' for this relation"));
  }
  std::ofstream file(f.pld_out, std::ios::binary);
  file << PldToJson(chosen->pld);
  if (!file) {
    return absl::UnavailableError(absl::StrCat("cannot write ", f.pld_out));
  }
  Output o;
  o.summary["pld"] = f.pld_out;
  o.table.columns = {"direction", "loss_start", "step", "points", "mass_inf",
                     "total_mass"};
  const DiscretePLD& p = chosen->pld;
  o.table.rows.push_back({chosen->direction, p.loss_start, p.step, p.size(),
                          p.mass_inf, p.TotalMass()});
  return o;
}

struct PldQueryFlags {
  std::string pld_in;
  std::vector<double> eps;
  std::vector<double> delta;
};

absl::StatusOr<Output> CmdPldQuery(const PldQueryFlags& f, std::ostream&) {
  std::ifstream file(f.pld_in, std::ios::binary);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot read ", f.pld_in));
  std::stringstream buffer;
  buffer << file.rdbuf();
  absl::StatusOr<DiscretePLD> pld = PldFromJson(buffer.str());
  if (!pld.ok()) return pld.status();
  Output o;
  o.table.columns = {"epsilon", "delta"};
  for (double e : f.eps) o.table.rows.push_back({e, DeltaOf(*pld, e)});
  for (double d : f.delta) {
    absl::StatusOr<double> e = EpsilonOf(*pld, d);
    if (!e.ok()) return e.status();
    o.table.rows.push_back({*e, d});
  }
  return o;
}

// ---------------------------------------------------------------------------

int ExitCodeFor(const absl::Status& s) {
  return absl::IsInvalidArgument(s) ? kExitUsage : kExitFailure;
}

std::string ManifestPath(const IoFlags& io) {
  if (!io.manifest.empty()) return io.manifest;
  if (!io.out.empty()) return io.out + ".manifest.json";
  return kDefaultManifest;
}

absl::Status WriteFile(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  file.close();
  if (!file) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::string>> LoadManifestArgs(
    const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  Json j = Json::parse(file, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.contains("args") || !j["args"].is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, " is not a run manifest"));
  }
  std::vector<std::string> args;
  for (const Json& a : j["args"]) {
    if (!a.is_string()) {
      return absl::InvalidArgumentError("manifest args must be strings");
    }
    args.push_back(a.get<std::string>());
  }
  if (!args.empty() && args.front() == "replay") {
    return absl::InvalidArgumentError("manifest replays itself");
  }
  return args;
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  if (const char* env = std::getenv(kThreadsEnv); env != nullptr) {
    const int threads = std::atoi(env);
    if (threads > 0) kernels::SetMaxThreads(threads);
  }

  CLI::App app{"Privacy accounting for composed subsampled mechanisms",
               "dpacct"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  IoFlags io;
  std::map<CLI::App*, std::function<absl::StatusOr<Output>()>> commands;
  auto add_command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    AddIoFlags(sub, &io);
    return sub;
  };

  DeltaFlags delta;
  CLI::App* c_delta = add_command("delta", "delta(eps) of a composed config");
  AddAccountingFlags(c_delta, &delta.acc);
  c_delta->add_option("--eps", delta.eps, "Epsilons (comma separated)")
      ->delimiter(',')
      ->required();
  c_delta->add_flag("--by-direction", delta.by_direction,
                    "One row per direction instead of the maximum");
  commands[c_delta] = [&] { return CmdDelta(delta, err); };

  EpsilonFlags epsilon;
  CLI::App* c_eps = add_command("epsilon", "eps(delta) of a composed config");
  AddAccountingFlags(c_eps, &epsilon.acc);
  c_eps->add_option("--delta", epsilon.delta, "Deltas (comma separated)")
      ->delimiter(',')
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  c_eps->add_flag("--by-direction", epsilon.by_direction,
                  "One row per direction instead of the maximum");
  commands[c_eps] = [&] { return CmdEpsilon(epsilon, err); };

  CalibrateFlags calibrate;
  CLI::App* c_cal = add_command(
      "calibrate", "Smallest noise for (eps, delta), or --table1");
  AddAccountingFlags(c_cal, &calibrate.acc);
  c_cal->add_flag("--table1", calibrate.table1,
                  "eps at sigma 0.8, gamma 0.001, k 1e4 for both schemes");
  c_cal->add_option("--epsilon", calibrate.epsilon)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_cal->add_option("--target-delta", calibrate.delta)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c_cal->add_option("--tolerance", calibrate.tolerance,
                    "Relative bisection tolerance")
      ->capture_default_str();
  commands[c_cal] = [&] { return CmdCalibrate(calibrate, err); };

  SweepFlags sweep;
  CLI::App* c_sweep =
      add_command("sweep", "Noise needed across sampling rates");
  c_sweep->add_flag("--figure2", sweep.figure2,
                    "Poisson eps 1, 2, 5, 10 and WOR eps 10")
      ->required();
  c_sweep->add_option("--gammas", sweep.gammas)
      ->delimiter(',')
      ->capture_default_str();
  c_sweep->add_option("--poisson-eps", sweep.poisson_eps)
      ->delimiter(',')
      ->capture_default_str();
  c_sweep->add_option("--wor-eps", sweep.wor_eps)
      ->delimiter(',')
      ->capture_default_str();
  c_sweep->add_option("--delta", sweep.delta)->capture_default_str();
  c_sweep->add_option("--k", sweep.k)->capture_default_str();
  c_sweep->add_option("--step", sweep.step)->capture_default_str();
  c_sweep->add_option("--tail", sweep.tail)->capture_default_str();
  c_sweep->add_option("--tolerance", sweep.tolerance)->capture_default_str();
  commands[c_sweep] = [&] { return CmdSweep(sweep, err); };

  McFlags mc;
  mc.acc.relation = "add";
  CLI::App* c_mc = add_command("mc", "Monte Carlo delta curve of one pair");
  AddAccountingFlags(c_mc, &mc.acc);
  c_mc->add_option("--eps", mc.eps)->delimiter(',')->capture_default_str();
  c_mc->add_option("--accuracy", mc.accuracy)->capture_default_str();
  c_mc->add_option("--confidence", mc.confidence)->capture_default_str();
  c_mc->add_option("--seed", mc.seed)->capture_default_str();
  c_mc->add_option("--samples", mc.samples,
                   "Override the Hoeffding sample count")
      ->capture_default_str();
  commands[c_mc] = [&] { return CmdMc(mc, err); };

  double h_accuracy = 0.001;
  double h_confidence = 0.01;
  int64_t h_grid = 40;
  CLI::App* c_h = add_command("hoeffding", "Monte Carlo sample count");
  c_h->add_option("--accuracy", h_accuracy)->capture_default_str();
  c_h->add_option("--confidence", h_confidence)->capture_default_str();
  c_h->add_option("--grid-size", h_grid)->capture_default_str();
  commands[c_h] = [&] {
    return CmdHoeffding(h_accuracy, h_confidence, h_grid);
  };

  CLI::App* c_rr = add_command(
      "rr-oracle", "Exact divergences of two randomized-response rounds");
  commands[c_rr] = [&] { return CmdRrOracle(); };

  Fig1Flags fig1;
  CLI::App* c_f1 =
      add_command("fig1", "Add vs remove for subsampled Laplace noise");
  c_f1->add_option("--scale", fig1.scale)->capture_default_str();
  c_f1->add_option("--gammas", fig1.gammas, "Candidate rates, first match")
      ->delimiter(',')
      ->capture_default_str();
  c_f1->add_option("--k-list", fig1.k_list)
      ->delimiter(',')
      ->capture_default_str();
  c_f1->add_option("--eps", fig1.eps)->delimiter(',');
  c_f1->add_option("--step", fig1.step)->capture_default_str();
  c_f1->add_flag("--no-mc", fig1.no_mc, "Skip the Monte Carlo curves");
  c_f1->add_option("--accuracy", fig1.accuracy)->capture_default_str();
  c_f1->add_option("--confidence", fig1.confidence)->capture_default_str();
  c_f1->add_option("--seed", fig1.seed)->capture_default_str();
  commands[c_f1] = [&] { return CmdFig1(fig1, err); };

  Fig3Flags fig3;
  CLI::App* c_f3 = add_command("fig3", "Three-pair substitution example");
  c_f3->add_option("--eps", fig3.eps)->delimiter(',');
  c_f3->add_option("--step", fig3.step)->capture_default_str();
  commands[c_f3] = [&] { return CmdFig3(fig3, err); };

  Fig4Flags fig4;
  CLI::App* c_f4 =
      add_command("fig4", "Connect-the-dots bound for WOR substitution");
  c_f4->add_option("--sigma", fig4.sigma)->capture_default_str();
  c_f4->add_option("--gamma", fig4.gamma)->capture_default_str();
  c_f4->add_option("--k", fig4.k)->capture_default_str();
  c_f4->add_option("--deltas", fig4.deltas)->delimiter(',');
  c_f4->add_option("--step", fig4.step)->capture_default_str();
  commands[c_f4] = [&] { return CmdFig4(fig4, err); };

  ConjectureFlags conj;
  CLI::App* c_conj = add_command(
      "conjecture", "Remove >= add sweep for subsampled Gaussian noise");
  c_conj->add_option("--sigmas", conj.sigmas)
      ->delimiter(',')
      ->capture_default_str();
  c_conj->add_option("--gammas", conj.gammas)
      ->delimiter(',')
      ->capture_default_str();
  c_conj->add_option("--ks", conj.ks)->delimiter(',')->capture_default_str();
  c_conj->add_option("--eps", conj.eps)->delimiter(',');
  c_conj->add_option("--step", conj.step)->capture_default_str();
  commands[c_conj] = [&] { return CmdConjecture(conj, err); };

  FactorTwoFlags f2;
  CLI::App* c_f2 =
      add_command("factor2", "WOR / Poisson noise ratio under add/remove");
  c_f2->add_option("--sigmas", f2.sigmas)
      ->delimiter(',')
      ->capture_default_str();
  c_f2->add_option("--gammas", f2.gammas)
      ->delimiter(',')
      ->capture_default_str();
  c_f2->add_option("--eps", f2.eps)->delimiter(',')->capture_default_str();
  c_f2->add_option("--step", f2.step)->capture_default_str();
  c_f2->add_option("--tolerance", f2.tolerance)->capture_default_str();
  commands[c_f2] = [&] { return CmdFactorTwo(f2, err); };

  PldBuildFlags build;
  CLI::App* c_build =
      add_command("pld-build", "Compose a config and save its PLD as JSON");
  AddAccountingFlags(c_build, &build.acc);
  c_build->add_option("--direction", build.direction,
                      "add | remove | substitution | combined (default: first)");
  c_build->add_option("--pld-out", build.pld_out)->required();
  commands[c_build] = [&] { return CmdPldBuild(build, err); };

  PldQueryFlags query;
  CLI::App* c_query = add_command("pld-query", "Query a saved PLD");
  c_query->add_option("--pld-in", query.pld_in)->required();
  c_query->add_option("--eps", query.eps)->delimiter(',');
  c_query->add_option("--delta", query.delta)->delimiter(',');
  commands[c_query] = [&] { return CmdPldQuery(query, err); };

  std::string replay_manifest;
  CLI::App* c_replay =
      app.add_subcommand("replay", "Re-run the command of a run manifest");
  c_replay->add_option("--manifest", replay_manifest)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    const std::vector<CLI::App*> parsed = app.get_subcommands();
    err << "error: " << e.what() << "\n"
        << (parsed.empty() ? app.help() : parsed.back()->help());
    return kExitUsage;
  }

  if (c_replay->parsed()) {
    absl::StatusOr<std::vector<std::string>> replay =
        LoadManifestArgs(replay_manifest);
    if (!replay.ok()) {
      err << "error: " << replay.status().message() << "\n";
      return ExitCodeFor(replay.status());
    }
    return RunCli(*replay, out, err);
  }

  for (auto& [sub, run] : commands) {
    if (!sub->parsed()) continue;
    absl::StatusOr<Output> result = run();
    if (!result.ok()) {
      err << "error: " << result.status().message() << "\n";
      if (ExitCodeFor(result.status()) == kExitUsage) {
        err << sub->help();
      }
      return ExitCodeFor(result.status());
    }
    std::string text = result->text;
    if (io.json) {
      text = RenderJson(result->table);
    } else if (text.empty()) {
      text = RenderCsv(result->table);
    }
    if (io.out.empty()) {
      out << text;
    } else if (absl::Status s = WriteFile(io.out, text); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitFailure;
    }

    Json manifest;
    manifest["command"] = sub->get_name();
    manifest["args"] = args;
    manifest["config"] = sub->config_to_str(/*default_also=*/true);
    manifest["defaults"] = Json{{"step", kDefaultStep},
                                {"tail_mass_bound", kDefaultTailMassBound},
                                {"rdp_min_order", kDefaultMinOrder},
                                {"rdp_max_order", kDefaultMaxOrder},
                                {"sigma_tolerance", kDefaultSigmaTolerance}};
    manifest["seed"] = result->seed;
    manifest["tool_version"] = kVersion;
    manifest["outputs"] = Json::array({io.out.empty() ? "-" : io.out});
    manifest["summary"] = result->summary;
    if (absl::Status s = WriteFile(ManifestPath(io), manifest.dump(2) + "\n");
        !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitFailure;
    }
    if (!result->failure.empty()) {
      err << "check failed: " << result->failure << "\n";
      return kExitFailure;
    }
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace dpacct::cli
