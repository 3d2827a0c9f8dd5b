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

// Hot loops of the accountant. Every kernel in `kernels` is OpenMP-parallel;
// `kernels::serial` holds straightforward single-threaded references used by
// the tests and the benchmark. Parallel and serial results agree bit for bit
// except Convolve, whose FFT path agrees with the direct sum to rounding.

#ifndef DPACCT_KERNELS_H_
#define DPACCT_KERNELS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dpacct/distribution.h"

namespace dpacct::kernels {

// Samples per Monte Carlo block. Each block owns the generator seeded from
// (seed, block index), so results do not depend on the thread count.
inline constexpr int64_t kMcBlockSize = 1 << 16;

// Below this many multiply-adds Convolve uses the direct sum.
inline constexpr int64_t kDirectConvolutionLimit = 1 << 20;

// Lattice loss values: loss_i = loss_start + i * step.
struct LatticeView {
  double loss_start = 0;
  double step = 1;
  std::span<const double> masses;
  double mass_inf = 0;
};

// Draws one single-step privacy loss.
using LossSampler = std::function<double(Rng&)>;

int MaxThreads();
void SetMaxThreads(int threads);

std::vector<double> MapGrid(std::span<const double> xs,
                            const std::function<double(double)>& fn);

// Calls fn(i) for i in [0, n); iterations must be independent.
void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn);

// Full linear convolution, length a.size() + b.size() - 1. Large inputs go
// through a threaded real FFT.
std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b);

// delta(eps) = sum_{loss_i > eps} m_i (1 - e^{eps - loss_i}) + mass_inf.
double DeltaOf(const LatticeView& pld, double eps);
std::vector<double> DeltaOfMany(const LatticeView& pld,
                                std::span<const double> eps);

// Mean over n draws of (1 - e^{eps - Y})_+ for each eps, Y a sum of k
// single-step losses.
std::vector<double> McHockeyStick(const LossSampler& sampler, int k,
                                  std::span<const double> eps, int64_t n,
                                  uint64_t seed);

namespace serial {

std::vector<double> MapGrid(std::span<const double> xs,
                            const std::function<double(double)>& fn);
void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn);
std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b);
std::vector<double> DeltaOfMany(const LatticeView& pld,
                                std::span<const double> eps);
std::vector<double> McHockeyStick(const LossSampler& sampler, int k,
                                  std::span<const double> eps, int64_t n,
                                  uint64_t seed);

}  // namespace serial
}  // namespace dpacct::kernels

#endif  // DPACCT_KERNELS_H_
