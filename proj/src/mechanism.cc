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

#include "dpacct/mechanism.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace dpacct {

absl::StatusOr<MechanismSpec> MechanismSpec::Gaussian(double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be finite and > 0, got ", sigma));
  }
  return MechanismSpec{NoiseKind::kGaussian, sigma};
}

absl::StatusOr<MechanismSpec> MechanismSpec::Laplace(double scale) {
  if (!std::isfinite(scale) || !(scale > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be finite and > 0, got ", scale));
  }
  return MechanismSpec{NoiseKind::kLaplace, scale};
}

Distribution MechanismSpec::Noise(double location) const {
  // Parameters were validated by the factories.
  if (noise == NoiseKind::kGaussian) {
    return *Distribution::Gaussian(location, parameter);
  }
  return *Distribution::Laplace(location, parameter);
}

namespace {

absl::StatusOr<SamplingScheme> MakeScheme(SchemeKind kind, double gamma) {
  if (!(gamma >= 0 && gamma <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in [0, 1], got ", gamma));
  }
  return SamplingScheme{kind, gamma};
}

}  // namespace

absl::StatusOr<SamplingScheme> SamplingScheme::Poisson(double gamma) {
  return MakeScheme(SchemeKind::kPoisson, gamma);
}

absl::StatusOr<SamplingScheme> SamplingScheme::Wor(double gamma) {
  return MakeScheme(SchemeKind::kWor, gamma);
}

std::string_view NoiseName(NoiseKind kind) {
  return kind == NoiseKind::kGaussian ? "gaussian" : "laplace";
}

std::string_view SchemeName(SchemeKind kind) {
  return kind == SchemeKind::kPoisson ? "poisson" : "wor";
}

std::string_view RelationName(Relation relation) {
  switch (relation) {
    case Relation::kAdd:
      return "add";
    case Relation::kRemove:
      return "remove";
    case Relation::kAddRemove:
      return "add-remove";
    case Relation::kSubstitution:
      return "substitution";
  }
  return "unknown";
}

absl::StatusOr<NoiseKind> ParseNoise(std::string_view text) {
  const std::string lower = absl::AsciiStrToLower(std::string(text));
  if (lower == "gaussian") return NoiseKind::kGaussian;
  if (lower == "laplace") return NoiseKind::kLaplace;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown noise '", std::string(text), "' (gaussian|laplace)"));
}

absl::StatusOr<SchemeKind> ParseScheme(std::string_view text) {
  const std::string lower = absl::AsciiStrToLower(std::string(text));
  if (lower == "poisson") return SchemeKind::kPoisson;
  if (lower == "wor") return SchemeKind::kWor;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scheme '", std::string(text), "' (poisson|wor)"));
}

absl::StatusOr<Relation> ParseRelation(std::string_view text) {
  const std::string lower = absl::AsciiStrToLower(std::string(text));
  if (lower == "add") return Relation::kAdd;
  if (lower == "remove") return Relation::kRemove;
  if (lower == "add-remove") return Relation::kAddRemove;
  if (lower == "substitution") return Relation::kSubstitution;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown relation '", std::string(text), "' (add|remove|add-remove|substitution)"));
}

}  // namespace dpacct
