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

#ifndef SPECNET_TENSOR_KERNELS_HPP_
#define SPECNET_TENSOR_KERNELS_HPP_

#include <cstddef>

namespace specnet {

// Sampling pattern of a 2-D convolution. Dilation is shared by both spatial
// axes; a dilation of d places kernel taps d input cells apart.
struct ConvGeometry {
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;
  std::size_t dilation = 1;

  static ConvGeometry square(std::size_t kernel, std::size_t stride = 1,
                             std::size_t pad = 0, std::size_t dilation = 1) {
    return {kernel, kernel, stride, stride, pad, pad, dilation};
  }
  // Output size preserving padding for stride 1 and an odd kernel.
  static ConvGeometry same(std::size_t kernel, std::size_t dilation = 1) {
    const std::size_t pad = dilation * (kernel - 1) / 2;
    return {kernel, kernel, 1, 1, pad, pad, dilation};
  }

  // Throws ShapeError when any entry is out of range.
  void validate() const;
  // Throws ShapeError when the dilated kernel does not fit the padded input.
  std::size_t output_height(std::size_t input_h) const;
  std::size_t output_width(std::size_t input_w) const;
};

// Dimensions of one convolution call, shared by every kernel flavour below.
struct ConvProblem {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t in_h = 1;
  std::size_t in_w = 1;
  ConvGeometry geom;

  std::size_t out_h() const { return geom.output_height(in_h); }
  std::size_t out_w() const { return geom.output_width(in_w); }
};

namespace kernels {

enum class Transpose { kNo, kYes };

// C = alpha * op(A) * op(B) + beta * C with row-major storage. op(A) is M x K
// and op(B) is K x N. Each output element is reduced by a single thread in
// ascending k order, so results do not depend on the thread count.
template <typename T>
void gemm(Transpose trans_a, Transpose trans_b, std::size_t m, std::size_t n,
          std::size_t k, T alpha, const T* a, std::size_t lda, const T* b,
          std::size_t ldb, T beta, T* c, std::size_t ldc);

// Serial triple loop with the same contract; kept for testing and benchmarks.
template <typename T>
void gemm_reference(Transpose trans_a, Transpose trans_b, std::size_t m,
                    std::size_t n, std::size_t k, T alpha, const T* a,
                    std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
                    std::size_t ldc);

// Patch unrolling: columns[(c*kh + i)*kw + j][oy*out_w + ox] holds the input
// tap sampled by kernel position (i, j) for output cell (oy, ox), or zero when
// that tap falls in the padding.
template <typename T>
void im2col(const T* image, std::size_t channels, std::size_t h, std::size_t w,
            const ConvGeometry& geom, T* columns);

// Scatter-add inverse of im2col.
template <typename T>
void col2im(const T* columns, std::size_t channels, std::size_t h,
            std::size_t w, const ConvGeometry& geom, T* image);

// Fast path: im2col + gemm, parallel over output rows. `bias` may be null.
// Layouts: input [N,Cin,H,W], weight [Cout,Cin,kh,kw], output [N,Cout,Ho,Wo].
template <typename T>
void conv2d_forward(const ConvProblem& p, const T* input, const T* weight,
                    const T* bias, T* output);

// Gradients accumulate (+=) into any non-null destination.
template <typename T>
void conv2d_backward(const ConvProblem& p, const T* input, const T* weight,
                     const T* grad_output, T* grad_input, T* grad_weight,
                     T* grad_bias);

// Direct loops over every output cell and tap. Serial.
template <typename T>
void conv2d_forward_reference(const ConvProblem& p, const T* input,
                              const T* weight, const T* bias, T* output);

template <typename T>
void conv2d_backward_reference(const ConvProblem& p, const T* input,
                               const T* weight, const T* grad_output,
                               T* grad_input, T* grad_weight, T* grad_bias);

}  // namespace kernels
}  // namespace specnet

#endif  // SPECNET_TENSOR_KERNELS_HPP_
