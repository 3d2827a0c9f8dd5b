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

#ifndef DPACCT_MECHANISM_H_
#define DPACCT_MECHANISM_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dpacct/distribution.h"

namespace dpacct {

enum class NoiseKind { kGaussian, kLaplace };

// Additive-noise sum query over records in [-1, 1]. `parameter` is the
// Gaussian standard deviation (noise multiplier) or the Laplace scale.
struct MechanismSpec {
  NoiseKind noise = NoiseKind::kGaussian;
  double parameter = 1.0;

  static absl::StatusOr<MechanismSpec> Gaussian(double sigma);
  static absl::StatusOr<MechanismSpec> Laplace(double scale);

  // The noise law centered at `location`.
  Distribution Noise(double location) const;
  MechanismSpec WithParameter(double p) const { return {noise, p}; }
};

enum class SchemeKind { kPoisson, kWor };

// Poisson sampling includes each record independently with probability
// gamma; sampling without replacement (WOR) draws a fixed batch b = gamma n.
struct SamplingScheme {
  SchemeKind kind = SchemeKind::kPoisson;
  double gamma = 1.0;

  static absl::StatusOr<SamplingScheme> Poisson(double gamma);
  static absl::StatusOr<SamplingScheme> Wor(double gamma);
};

enum class Relation { kAdd, kRemove, kAddRemove, kSubstitution };

std::string_view NoiseName(NoiseKind kind);
std::string_view SchemeName(SchemeKind kind);
std::string_view RelationName(Relation relation);

absl::StatusOr<NoiseKind> ParseNoise(std::string_view text);
absl::StatusOr<SchemeKind> ParseScheme(std::string_view text);
absl::StatusOr<Relation> ParseRelation(std::string_view text);

}  // namespace dpacct

#endif  // DPACCT_MECHANISM_H_
