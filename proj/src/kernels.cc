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

#include "dpacct/kernels.h"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>

#include "dpacct/numeric.h"

namespace dpacct::kernels {
namespace {

std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

void InitFftwThreads() {
  static std::once_flag once;
  std::call_once(once, [] {
    fftw_init_threads();
    fftw_make_planner_thread_safe();
  });
}

// Smallest 7-smooth integer >= n.
int64_t FftSize(int64_t n) {
  int64_t best = int64_t{1} << static_cast<int>(std::ceil(std::log2(
                     static_cast<double>(std::max<int64_t>(n, 1)))));
  for (int64_t p7 = 1; p7 < best; p7 *= 7) {
    for (int64_t p5 = p7; p5 < best; p5 *= 5) {
      for (int64_t p3 = p5; p3 < best; p3 *= 3) {
        int64_t v = p3;
        while (v < n) v *= 2;
        best = std::min(best, v);
      }
    }
  }
  return best;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b) {
  InitFftwThreads();
  const int64_t out_len = static_cast<int64_t>(a.size() + b.size()) - 1;
  const int64_t n = FftSize(out_len);
  const int64_t nc = n / 2 + 1;
  std::unique_ptr<double, FftwFree> ra(fftw_alloc_real(n));
  std::unique_ptr<double, FftwFree> rb(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> ca(fftw_alloc_complex(nc));
  std::unique_ptr<fftw_complex, FftwFree> cb(fftw_alloc_complex(nc));

  fftw_plan fa, fb, inv;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_plan_with_nthreads(MaxThreads());
    fa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.get(), ca.get(),
                              FFTW_ESTIMATE);
    fb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb.get(), cb.get(),
                              FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca.get(), ra.get(),
                               FFTW_ESTIMATE);
  }
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  fftw_execute(fa);
  fftw_execute(fb);

  fftw_complex* x = ca.get();
  const fftw_complex* y = cb.get();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < nc; ++i) {
    const double re = x[i][0] * y[i][0] - x[i][1] * y[i][1];
    const double im = x[i][0] * y[i][1] + x[i][1] * y[i][0];
    x[i][0] = re;
    x[i][1] = im;
  }
  fftw_execute(inv);

  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  const double* r = ra.get();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < out_len; ++i) out[i] = r[i] * scale;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(fa);
    fftw_destroy_plan(fb);
    fftw_destroy_plan(inv);
  }
  return out;
}

// Output entry i of a * b, summed in a fixed order.
double ConvolveEntry(std::span<const double> a, std::span<const double> b,
                     int64_t i) {
  const int64_t na = static_cast<int64_t>(a.size());
  const int64_t nb = static_cast<int64_t>(b.size());
  const int64_t lo = std::max<int64_t>(0, i - nb + 1);
  const int64_t hi = std::min<int64_t>(i, na - 1);
  double acc = 0;
  for (int64_t j = lo; j <= hi; ++j) acc += a[j] * b[i - j];
  return acc;
}

// First lattice index whose loss exceeds eps.
int64_t FirstAbove(const LatticeView& pld, double eps) {
  const int64_t n = static_cast<int64_t>(pld.masses.size());
  const double pos = (eps - pld.loss_start) / pld.step;
  int64_t j = pos < 0 ? 0
                      : static_cast<int64_t>(
                            std::min<double>(std::floor(pos) + 1, n));
  while (j > 0 && pld.loss_start + (j - 1) * pld.step > eps) --j;
  while (j < n && pld.loss_start + j * pld.step <= eps) ++j;
  return j;
}

double DeltaOfImpl(const LatticeView& pld, double eps) {
  if (eps == -std::numeric_limits<double>::infinity()) return 1.0;
  const int64_t n = static_cast<int64_t>(pld.masses.size());
  CompensatedSum sum;
  for (int64_t i = n - 1; i >= FirstAbove(pld, eps); --i) {
    const double m = pld.masses[i];
    if (m == 0) continue;
    sum.Add(m * -std::expm1(eps - (pld.loss_start + i * pld.step)));
  }
  sum.Add(pld.mass_inf);
  return std::clamp(sum.Total(), 0.0, 1.0);
}

Rng BlockRng(uint64_t seed, int64_t block) {
  const auto b = static_cast<uint64_t>(block);
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
  return Rng(seq);
}

std::vector<CompensatedSum> McBlock(const LossSampler& sampler, int k,
                                    std::span<const double> eps,
                                    int64_t count, uint64_t seed,
                                    int64_t block) {
  Rng rng = BlockRng(seed, block);
  std::vector<CompensatedSum> sums(eps.size());
  for (int64_t s = 0; s < count; ++s) {
    double y = 0;
    for (int j = 0; j < k; ++j) y += sampler(rng);
    if (std::isnan(y)) y = -std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < eps.size(); ++e) {
      if (y > eps[e]) sums[e].Add(-std::expm1(eps[e] - y));
    }
  }
  return sums;
}

std::vector<double> MergeBlocks(
    const std::vector<std::vector<CompensatedSum>>& blocks, size_t n_eps,
    int64_t n) {
  std::vector<double> out(n_eps);
  for (size_t e = 0; e < n_eps; ++e) {
    CompensatedSum total;
    for (const auto& block : blocks) total.Add(block[e]);
    out[e] = std::clamp(total.Total() / static_cast<double>(n), 0.0, 1.0);
  }
  return out;
}

int64_t NumBlocks(int64_t n) { return (n + kMcBlockSize - 1) / kMcBlockSize; }

int64_t BlockCount(int64_t n, int64_t block) {
  return std::min(kMcBlockSize, n - block * kMcBlockSize);
}

}  // namespace

int MaxThreads() { return omp_get_max_threads(); }

void SetMaxThreads(int threads) { omp_set_num_threads(std::max(1, threads)); }

std::vector<double> MapGrid(std::span<const double> xs,
                            const std::function<double(double)>& fn) {
  const int64_t n = static_cast<int64_t>(xs.size());
  std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i) out[i] = fn(xs[i]);
  return out;
}

void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn) {
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i) fn(i);
}

std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const auto na = static_cast<int64_t>(a.size());
  const auto nb = static_cast<int64_t>(b.size());
  if (std::min(na, nb) > 32 && na * nb > kDirectConvolutionLimit) {
    return ConvolveFft(a, b);
  }
  const int64_t out_len = na + nb - 1;
  std::vector<double> out(out_len);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < out_len; ++i) out[i] = ConvolveEntry(a, b, i);
  return out;
}

double DeltaOf(const LatticeView& pld, double eps) {
  return DeltaOfImpl(pld, eps);
}

std::vector<double> DeltaOfMany(const LatticeView& pld,
                                std::span<const double> eps) {
  const int64_t n = static_cast<int64_t>(eps.size());
  std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t i = 0; i < n; ++i) out[i] = DeltaOfImpl(pld, eps[i]);
  return out;
}

std::vector<double> McHockeyStick(const LossSampler& sampler, int k,
                                  std::span<const double> eps, int64_t n,
                                  uint64_t seed) {
  const int64_t blocks = NumBlocks(n);
  std::vector<std::vector<CompensatedSum>> sums(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t b = 0; b < blocks; ++b) {
    sums[b] = McBlock(sampler, k, eps, BlockCount(n, b), seed, b);
  }
  return MergeBlocks(sums, eps.size(), n);
}

namespace serial {

std::vector<double> MapGrid(std::span<const double> xs,
                            const std::function<double(double)>& fn) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(fn(x));
  return out;
}

void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn) {
  for (int64_t i = 0; i < n; ++i) fn(i);
}

std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const int64_t out_len = static_cast<int64_t>(a.size() + b.size()) - 1;
  std::vector<double> out(out_len);
  for (int64_t i = 0; i < out_len; ++i) out[i] = ConvolveEntry(a, b, i);
  return out;
}

std::vector<double> DeltaOfMany(const LatticeView& pld,
                                std::span<const double> eps) {
  std::vector<double> out;
  out.reserve(eps.size());
  for (double e : eps) out.push_back(DeltaOfImpl(pld, e));
  return out;
}

std::vector<double> McHockeyStick(const LossSampler& sampler, int k,
                                  std::span<const double> eps, int64_t n,
                                  uint64_t seed) {
  const int64_t blocks = NumBlocks(n);
  std::vector<std::vector<CompensatedSum>> sums;
  sums.reserve(blocks);
  for (int64_t b = 0; b < blocks; ++b) {
    sums.push_back(McBlock(sampler, k, eps, BlockCount(n, b), seed, b));
  }
  return MergeBlocks(sums, eps.size(), n);
}

}  // namespace serial
}  // namespace dpacct::kernels
