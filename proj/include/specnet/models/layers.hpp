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

#ifndef SPECNET_MODELS_LAYERS_HPP_
#define SPECNET_MODELS_LAYERS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "specnet/tensor/ops.hpp"

namespace specnet {

// Called once per tensor a layer owns: trainable parameters and buffers
// (batch-norm running statistics) alike.
using ParamVisitor =
    std::function<void(const std::string& name, Tensor& tensor, bool trainable)>;

using Rng = std::mt19937_64;

// Zero-mean normal with standard deviation sqrt(gain / fan_in).
Tensor fan_in_normal(Shape shape, std::size_t fan_in, double gain, Rng& rng);

struct Conv2d {
  Tensor weight;  // [out, in, kh, kw]
  Tensor bias;    // [out] or undefined
  ConvGeometry geom;

  static Conv2d make(std::size_t in_channels, std::size_t out_channels,
                     const ConvGeometry& geom, bool with_bias, Rng& rng);
  Tensor forward(const Tensor& x) const { return conv2d(x, weight, bias, geom); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
  std::size_t in_channels() const { return weight.dim(1); }
  std::size_t out_channels() const { return weight.dim(0); }
};

struct BatchNorm2d {
  BatchNormState state;

  static BatchNorm2d make(std::size_t channels) { return {BatchNormState::make(channels)}; }
  Tensor forward(const Tensor& x, Mode mode) { return batch_norm2d(x, state, mode); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
  void reset_statistics();
};

struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]

  static Linear make(std::size_t in_features, std::size_t out_features, Rng& rng);
  Tensor forward(const Tensor& x) const { return affine(x, weight, bias); }
  void visit(const std::string& prefix, const ParamVisitor& fn);
  std::size_t in_features() const { return weight.dim(0); }
  std::size_t out_features() const { return weight.dim(1); }
};

// Parallel 3x3 convolutions with dilations 1..4 over a single-channel
// spectrogram. Branch d is padded by d so every branch keeps the input's
// spatial size, and the branch outputs are stacked as channels in ascending
// dilation order. No nonlinearity is applied before stacking.
struct MultiscaleAdapter {
  static constexpr std::size_t kKernel = 3;
  static constexpr std::size_t kDilations[] = {1, 2, 3, 4};

  std::vector<Conv2d> branches;

  static MultiscaleAdapter make(std::size_t per_branch_channels, Rng& rng);
  Tensor forward(const Tensor& x) const;
  void visit(const std::string& prefix, const ParamVisitor& fn);
  std::size_t out_channels() const;
};

}  // namespace specnet

#endif  // SPECNET_MODELS_LAYERS_HPP_
