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

#include <algorithm>
#include <vector>

#include "specnet/tensor/kernels.hpp"

namespace specnet::kernels {

namespace {

constexpr std::size_t kColumnBlock = 256;
constexpr std::size_t kRowBlock = 4;
// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 16;

template <typename T>
void transpose_into(const T* src, std::size_t rows, std::size_t cols,
                    std::size_t ld, std::vector<T>& dst) {
  // src is rows x cols with leading dimension ld; dst becomes cols x rows.
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* s = src + r * ld;
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = s[c];
  }
}

template <typename T>
void scale_rows(std::size_t m, std::size_t n, T beta, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    T* row = c + i * ldc;
    if (beta == T(0)) {
      std::fill(row, row + n, T(0));
    } else if (beta != T(1)) {
      for (std::size_t j = 0; j < n; ++j) row[j] *= beta;
    }
  }
}

// Four output rows share each streamed row of B.
template <typename T>
void kernel_4rows(std::size_t i0, std::size_t n, std::size_t k, T alpha,
                  const T* a, std::size_t lda, const T* b, std::size_t ldb,
                  T* c, std::size_t ldc) {
  for (std::size_t jb = 0; jb < n; jb += kColumnBlock) {
    const std::size_t jn = std::min(kColumnBlock, n - jb);
    T* __restrict c0 = c + (i0 + 0) * ldc + jb;
    T* __restrict c1 = c + (i0 + 1) * ldc + jb;
    T* __restrict c2 = c + (i0 + 2) * ldc + jb;
    T* __restrict c3 = c + (i0 + 3) * ldc + jb;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T* __restrict brow = b + kk * ldb + jb;
      const T a0 = alpha * a[(i0 + 0) * lda + kk];
      const T a1 = alpha * a[(i0 + 1) * lda + kk];
      const T a2 = alpha * a[(i0 + 2) * lda + kk];
      const T a3 = alpha * a[(i0 + 3) * lda + kk];
      for (std::size_t j = 0; j < jn; ++j) {
        const T bj = brow[j];
        c0[j] += a0 * bj;
        c1[j] += a1 * bj;
        c2[j] += a2 * bj;
        c3[j] += a3 * bj;
      }
    }
  }
}

template <typename T>
void kernel_1row(std::size_t i, std::size_t n, std::size_t k, T alpha,
                 const T* a, std::size_t lda, const T* b, std::size_t ldb,
                 T* c, std::size_t ldc) {
  for (std::size_t jb = 0; jb < n; jb += kColumnBlock) {
    const std::size_t jn = std::min(kColumnBlock, n - jb);
    T* __restrict c0 = c + i * ldc + jb;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T* __restrict brow = b + kk * ldb + jb;
      const T a0 = alpha * a[i * lda + kk];
      for (std::size_t j = 0; j < jn; ++j) c0[j] += a0 * brow[j];
    }
  }
}

}  // namespace

template <typename T>
void gemm(Transpose trans_a, Transpose trans_b, std::size_t m, std::size_t n,
          std::size_t k, T alpha, const T* a, std::size_t lda, const T* b,
          std::size_t ldb, T beta, T* c, std::size_t ldc) {
  if (m == 0 || n == 0) return;
  scale_rows(m, n, beta, c, ldc);
  if (k == 0 || alpha == T(0)) return;

  std::vector<T> a_packed;
  std::vector<T> b_packed;
  if (trans_a == Transpose::kYes) {
    // Stored as K x M.
    transpose_into(a, k, m, lda, a_packed);
    a = a_packed.data();
    lda = k;
  }
  if (trans_b == Transpose::kYes) {
    // Stored as N x K.
    transpose_into(b, n, k, ldb, b_packed);
    b = b_packed.data();
    ldb = n;
  }

  const std::size_t full_blocks = m / kRowBlock;
  const bool parallel = m * n * k >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t blk = 0; blk < full_blocks; ++blk) {
    kernel_4rows(blk * kRowBlock, n, k, alpha, a, lda, b, ldb, c, ldc);
  }
  for (std::size_t i = full_blocks * kRowBlock; i < m; ++i) {
    kernel_1row(i, n, k, alpha, a, lda, b, ldb, c, ldc);
  }
}

template <typename T>
void gemm_reference(Transpose trans_a, Transpose trans_b, std::size_t m,
                    std::size_t n, std::size_t k, T alpha, const T* a,
                    std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
                    std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const T av = trans_a == Transpose::kYes ? a[kk * lda + i] : a[i * lda + kk];
        const T bv = trans_b == Transpose::kYes ? b[j * ldb + kk] : b[kk * ldb + j];
        acc += av * bv;
      }
      T& out = c[i * ldc + j];
      out = (beta == T(0) ? T(0) : beta * out) + alpha * acc;
    }
  }
}

template void gemm<float>(Transpose, Transpose, std::size_t, std::size_t,
                          std::size_t, float, const float*, std::size_t,
                          const float*, std::size_t, float, float*, std::size_t);
template void gemm<double>(Transpose, Transpose, std::size_t, std::size_t,
                           std::size_t, double, const double*, std::size_t,
                           const double*, std::size_t, double, double*,
                           std::size_t);
template void gemm_reference<float>(Transpose, Transpose, std::size_t,
                                    std::size_t, std::size_t, float,
                                    const float*, std::size_t, const float*,
                                    std::size_t, float, float*, std::size_t);
template void gemm_reference<double>(Transpose, Transpose, std::size_t,
                                     std::size_t, std::size_t, double,
                                     const double*, std::size_t, const double*,
                                     std::size_t, double, double*, std::size_t);

}  // namespace specnet::kernels
