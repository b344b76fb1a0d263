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

#ifndef SPECNET_TENSOR_OPS_HPP_
#define SPECNET_TENSOR_OPS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "specnet/tensor/kernels.hpp"
#include "specnet/tensor/tensor.hpp"

namespace specnet {

enum class Mode { kTrain, kEval };
enum class PoolKind { kMax, kAvg };

struct PoolGeometry {
  std::size_t window_h = 2;
  std::size_t window_w = 2;
  std::size_t stride_h = 2;
  std::size_t stride_w = 2;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;

  static PoolGeometry square(std::size_t window, std::size_t stride,
                             std::size_t pad = 0) {
    return {window, window, stride, stride, pad, pad};
  }
};

// Per-channel affine parameters plus running statistics. gamma and beta are
// trainable leaves; the running statistics are plain buffers.
template <typename T>
struct BasicBatchNormState {
  BasicTensor<T> gamma;
  BasicTensor<T> beta;
  BasicTensor<T> running_mean;
  BasicTensor<T> running_var;
  T momentum = T(0.1);
  T eps = T(1e-5);

  static BasicBatchNormState make(std::size_t channels);
  std::size_t channels() const { return gamma.numel(); }
};
using BatchNormState = BasicBatchNormState<float>;

// Elementwise.
template <typename T> BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T> BasicTensor<T> scale(const BasicTensor<T>& a, T factor);
template <typename T> BasicTensor<T> relu(const BasicTensor<T>& x);

// Reductions to a scalar.
template <typename T> BasicTensor<T> sum(const BasicTensor<T>& x);
template <typename T> BasicTensor<T> mean(const BasicTensor<T>& x);

template <typename T> BasicTensor<T> reshape(const BasicTensor<T>& x, Shape shape);
// [N, ...] -> [N, prod(...)]
template <typename T> BasicTensor<T> flatten(const BasicTensor<T>& x);

// Cross-correlation of [N,Cin,H,W] with [Cout,Cin,kh,kw]. `bias` may be an
// undefined tensor. Out-of-range input taps read as zero.
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, const ConvGeometry& geom);

// Padding cells never win the max. Gradient goes to the first maximal cell
// in row-major window order.
template <typename T>
BasicTensor<T> max_pool2d(const BasicTensor<T>& input, const PoolGeometry& geom);

// Averages over the full window, padding cells included as zeros.
template <typename T>
BasicTensor<T> avg_pool2d(const BasicTensor<T>& input, const PoolGeometry& geom);

// [N,C,H,W] -> [N,C,1,1], pooling over whatever spatial extent arrives.
template <typename T>
BasicTensor<T> global_pool(const BasicTensor<T>& input, PoolKind kind);

// Train mode normalizes with batch statistics (biased variance) and folds the
// batch mean and unbiased variance into the running statistics; eval mode
// uses the running statistics and leaves them untouched.
template <typename T>
BasicTensor<T> batch_norm2d(const BasicTensor<T>& input,
                            BasicBatchNormState<T>& state, Mode mode);

// [N,F] x [F,K] + [K]
template <typename T>
BasicTensor<T> affine(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias);

template <typename T>
BasicTensor<T> channel_concat(std::span<const BasicTensor<T>> inputs);

// Mean over the batch of -log softmax(logits)[label].
template <typename T>
BasicTensor<T> cross_entropy_from_logits(const BasicTensor<T>& logits,
                                         std::span<const int> labels);

// Row-wise argmax of [N,K] logits.
template <typename T>
std::vector<int> argmax_rows(const BasicTensor<T>& logits);

}  // namespace specnet

#endif  // SPECNET_TENSOR_OPS_HPP_
