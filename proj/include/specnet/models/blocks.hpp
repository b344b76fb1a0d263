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

#ifndef SPECNET_MODELS_BLOCKS_HPP_
#define SPECNET_MODELS_BLOCKS_HPP_

#include <optional>
#include <vector>

#include "specnet/models/layers.hpp"

namespace specnet {

// Pre-activation residual unit: output = F(x) + shortcut(x), where F is
// BN-ReLU-conv repeated twice (basic) or three times (bottleneck, expansion 4)
// and shortcut is the identity or a strided 1x1 projection when the channel
// count or stride changes. Nothing is applied after the sum.
class ResidualBlock {
 public:
  static constexpr std::size_t kBottleneckExpansion = 4;

  static ResidualBlock make_basic(std::size_t in_channels, std::size_t channels,
                                  std::size_t stride, Rng& rng);
  static ResidualBlock make_bottleneck(std::size_t in_channels, std::size_t channels,
                                       std::size_t stride, Rng& rng);

  Tensor forward(const Tensor& x, Mode mode);
  Tensor residual(const Tensor& x, Mode mode);
  Tensor shortcut(const Tensor& x) const;

  void visit(const std::string& prefix, const ParamVisitor& fn);
  std::size_t out_channels() const { return convs_.back().out_channels(); }
  bool has_projection() const { return projection_.has_value(); }
  std::vector<Conv2d>& convs() { return convs_; }
  std::vector<BatchNorm2d>& norms() { return norms_; }

 private:
  std::vector<BatchNorm2d> norms_;
  std::vector<Conv2d> convs_;
  std::optional<Conv2d> projection_;
};

// BN-ReLU-conv1x1(bn_size * growth)-BN-ReLU-conv3x3(growth).
struct DenseLayer {
  BatchNorm2d norm1;
  Conv2d conv1;
  BatchNorm2d norm2;
  Conv2d conv2;

  static DenseLayer make(std::size_t in_channels, std::size_t growth, std::size_t bn_size,
                         Rng& rng);
  Tensor forward(const Tensor& x, Mode mode);
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

// Layer l consumes the channel concatenation of the block input and the
// outputs of layers 0..l-1; the block returns the concatenation of all of
// them, C_in + L * growth channels.
class DenseBlock {
 public:
  static DenseBlock make(std::size_t in_channels, std::size_t num_layers, std::size_t growth,
                         std::size_t bn_size, Rng& rng);

  // When `layer_inputs` is non-null it receives the tensor fed to each layer.
  Tensor forward(const Tensor& x, Mode mode, std::vector<Tensor>* layer_inputs = nullptr);
  void visit(const std::string& prefix, const ParamVisitor& fn);

  std::size_t in_channels() const { return in_channels_; }
  std::size_t out_channels() const { return in_channels_ + layers_.size() * growth_; }
  std::vector<DenseLayer>& layers() { return layers_; }

 private:
  std::size_t in_channels_ = 0;
  std::size_t growth_ = 0;
  std::vector<DenseLayer> layers_;
};

// BN-ReLU-conv1x1-avgpool(2). The pool window shrinks to fit maps narrower
// than two cells.
struct Transition {
  BatchNorm2d norm;
  Conv2d conv;

  static Transition make(std::size_t in_channels, std::size_t out_channels, Rng& rng);
  Tensor forward(const Tensor& x, Mode mode);
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

}  // namespace specnet

#endif  // SPECNET_MODELS_BLOCKS_HPP_
