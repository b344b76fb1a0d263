/* Copyright 2026 The SpecNet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Times the parallel im2col/gemm convolution against the serial reference
// loops on model-sized problems. Thread count follows OMP_NUM_THREADS.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "specnet/tensor/kernels.hpp"

namespace {

using namespace specnet;

template <typename Fn>
double best_of(int reps, Fn fn) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

std::vector<float> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<float> dist;
  std::vector<float> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void bench_conv(const char* label, const ConvProblem& p, std::mt19937_64& rng) {
  const auto x = random_values(p.batch * p.in_channels * p.in_h * p.in_w, rng);
  const auto w = random_values(p.out_channels * p.in_channels * p.geom.kernel_h * p.geom.kernel_w, rng);
  const auto b = random_values(p.out_channels, rng);
  std::vector<float> y_fast(p.batch * p.out_channels * p.out_h() * p.out_w());
  std::vector<float> y_ref(y_fast.size());
  const double fast = best_of(3, [&] { kernels::conv2d_forward(p, x.data(), w.data(), b.data(), y_fast.data()); });
  const double ref = best_of(1, [&] { kernels::conv2d_forward_reference(p, x.data(), w.data(), b.data(), y_ref.data()); });
  float max_diff = 0.0f;
  for (std::size_t i = 0; i < y_fast.size(); ++i) max_diff = std::max(max_diff, std::abs(y_fast[i] - y_ref[i]));
  std::printf("%-28s fast %8.2f ms  reference %8.2f ms  speedup %6.1fx  max|diff| %.3g\n", label,
              fast * 1e3, ref * 1e3, ref / fast, double(max_diff));
}

void bench_gemm(std::size_t n, std::mt19937_64& rng) {
  const auto a = random_values(n * n, rng);
  const auto b = random_values(n * n, rng);
  std::vector<float> c(n * n), c_ref(n * n);
  const double fast = best_of(3, [&] {
    kernels::gemm(kernels::Transpose::kNo, kernels::Transpose::kNo, n, n, n, 1.0f, a.data(), n, b.data(), n, 0.0f, c.data(), n);
  });
  const double ref = best_of(1, [&] {
    kernels::gemm_reference(kernels::Transpose::kNo, kernels::Transpose::kNo, n, n, n, 1.0f, a.data(), n, b.data(), n, 0.0f,
                            c_ref.data(), n);
  });
  std::printf("gemm %4zu^3                  fast %8.2f ms  reference %8.2f ms  speedup %6.1fx  %.2f GFLOP/s\n", n,
              fast * 1e3, ref * 1e3, ref / fast, 2.0 * double(n * n * n) / fast * 1e-9);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::mt19937_64 rng(42);
  bench_gemm(256, rng);
  bench_gemm(512, rng);
  for (std::size_t d = 1; d <= 4; ++d) {
    ConvProblem p{8, 1, 8, 171, 64, ConvGeometry::same(3, d)};
    char label[64];
    std::snprintf(label, sizeof(label), "adapter branch d=%zu", d);
    bench_conv(label, p, rng);
  }
  bench_conv("stem 7x7/2, 32->64", ConvProblem{8, 32, 64, 171, 64, ConvGeometry::square(7, 2, 3)}, rng);
  bench_conv("dense 3x3, 128->32", ConvProblem{8, 128, 32, 43, 16, ConvGeometry::same(3)}, rng);
  bench_conv("bottleneck 1x1, 256->128", ConvProblem{8, 256, 128, 43, 16, ConvGeometry::square(1)}, rng);
  return 0;
}
