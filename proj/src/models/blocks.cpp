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

#include "specnet/models/blocks.hpp"

#include <algorithm>

namespace specnet {

ResidualBlock ResidualBlock::make_basic(std::size_t in_channels, std::size_t channels,
                                        std::size_t stride, Rng& rng) {
  ResidualBlock block;
  block.norms_.push_back(BatchNorm2d::make(in_channels));
  block.convs_.push_back(Conv2d::make(in_channels, channels, ConvGeometry::square(3, stride, 1), false, rng));
  block.norms_.push_back(BatchNorm2d::make(channels));
  block.convs_.push_back(Conv2d::make(channels, channels, ConvGeometry::square(3, 1, 1), false, rng));
  if (stride != 1 || in_channels != channels) {
    block.projection_ = Conv2d::make(in_channels, channels, ConvGeometry::square(1, stride), false, rng);
  }
  return block;
}

ResidualBlock ResidualBlock::make_bottleneck(std::size_t in_channels, std::size_t channels,
                                             std::size_t stride, Rng& rng) {
  const std::size_t out = channels * kBottleneckExpansion;
  ResidualBlock block;
  block.norms_.push_back(BatchNorm2d::make(in_channels));
  block.convs_.push_back(Conv2d::make(in_channels, channels, ConvGeometry::square(1), false, rng));
  block.norms_.push_back(BatchNorm2d::make(channels));
  block.convs_.push_back(Conv2d::make(channels, channels, ConvGeometry::square(3, stride, 1), false, rng));
  block.norms_.push_back(BatchNorm2d::make(channels));
  block.convs_.push_back(Conv2d::make(channels, out, ConvGeometry::square(1), false, rng));
  if (stride != 1 || in_channels != out) {
    block.projection_ = Conv2d::make(in_channels, out, ConvGeometry::square(1, stride), false, rng);
  }
  return block;
}

Tensor ResidualBlock::residual(const Tensor& x, Mode mode) {
  Tensor h = x;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = convs_[i].forward(relu(norms_[i].forward(h, mode)));
  }
  return h;
}

Tensor ResidualBlock::shortcut(const Tensor& x) const {
  return projection_ ? projection_->forward(x) : x;
}

Tensor ResidualBlock::forward(const Tensor& x, Mode mode) {
  Tensor f = residual(x, mode);
  Tensor s = shortcut(x);
  if (f.shape() != s.shape()) {
    throw ShapeError("residual block: F(x) " + shape_to_string(f.shape()) +
                     " cannot be summed with shortcut " + shape_to_string(s.shape()));
  }
  return add(f, s);
}

void ResidualBlock::visit(const std::string& prefix, const ParamVisitor& fn) {
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    norms_[i].visit(prefix + ".bn" + std::to_string(i + 1), fn);
    convs_[i].visit(prefix + ".conv" + std::to_string(i + 1), fn);
  }
  if (projection_) projection_->visit(prefix + ".projection", fn);
}

DenseLayer DenseLayer::make(std::size_t in_channels, std::size_t growth, std::size_t bn_size,
                            Rng& rng) {
  const std::size_t inner = bn_size * growth;
  return DenseLayer{
      BatchNorm2d::make(in_channels),
      Conv2d::make(in_channels, inner, ConvGeometry::square(1), false, rng),
      BatchNorm2d::make(inner),
      Conv2d::make(inner, growth, ConvGeometry::square(3, 1, 1), false, rng),
  };
}

Tensor DenseLayer::forward(const Tensor& x, Mode mode) {
  Tensor h = conv1.forward(relu(norm1.forward(x, mode)));
  return conv2.forward(relu(norm2.forward(h, mode)));
}

void DenseLayer::visit(const std::string& prefix, const ParamVisitor& fn) {
  norm1.visit(prefix + ".norm1", fn);
  conv1.visit(prefix + ".conv1", fn);
  norm2.visit(prefix + ".norm2", fn);
  conv2.visit(prefix + ".conv2", fn);
}

DenseBlock DenseBlock::make(std::size_t in_channels, std::size_t num_layers, std::size_t growth,
                            std::size_t bn_size, Rng& rng) {
  if (growth == 0) throw ShapeError("dense block: growth rate must be >= 1");
  DenseBlock block;
  block.in_channels_ = in_channels;
  block.growth_ = growth;
  for (std::size_t l = 0; l < num_layers; ++l) {
    block.layers_.push_back(DenseLayer::make(in_channels + l * growth, growth, bn_size, rng));
  }
  return block;
}

Tensor DenseBlock::forward(const Tensor& x, Mode mode, std::vector<Tensor>* layer_inputs) {
  if (x.rank() != 4 || x.dim(1) != in_channels_) {
    throw ShapeError("dense block: expects " + std::to_string(in_channels_) +
                     " input channels, got " + shape_to_string(x.shape()));
  }
  std::vector<Tensor> features{x};
  for (auto& layer : layers_) {
    Tensor input = features.size() == 1 ? features[0] : channel_concat<float>(features);
    if (layer_inputs) layer_inputs->push_back(input);
    features.push_back(layer.forward(input, mode));
  }
  return features.size() == 1 ? features[0] : channel_concat<float>(features);
}

void DenseBlock::visit(const std::string& prefix, const ParamVisitor& fn) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].visit(prefix + ".layer" + std::to_string(l + 1), fn);
  }
}

Transition Transition::make(std::size_t in_channels, std::size_t out_channels, Rng& rng) {
  return Transition{BatchNorm2d::make(in_channels),
                    Conv2d::make(in_channels, out_channels, ConvGeometry::square(1), false, rng)};
}

Tensor Transition::forward(const Tensor& x, Mode mode) {
  Tensor h = conv.forward(relu(norm.forward(x, mode)));
  const std::size_t wh = std::min<std::size_t>(2, h.dim(2));
  const std::size_t ww = std::min<std::size_t>(2, h.dim(3));
  return avg_pool2d(h, PoolGeometry{wh, ww, wh, ww, 0, 0});
}

void Transition::visit(const std::string& prefix, const ParamVisitor& fn) {
  norm.visit(prefix + ".norm", fn);
  conv.visit(prefix + ".conv", fn);
}

}  // namespace specnet
