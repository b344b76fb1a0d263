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

#include "specnet/models/layers.hpp"

#include <cmath>

namespace specnet {

Tensor fan_in_normal(Shape shape, std::size_t fan_in, double gain, Rng& rng) {
  std::normal_distribution<float> dist(0.0f, float(std::sqrt(gain / double(fan_in))));
  std::vector<float> values(shape_numel(shape));
  for (auto& v : values) v = dist(rng);
  Tensor t(std::move(shape), std::move(values));
  t.set_requires_grad(true);
  return t;
}

Conv2d Conv2d::make(std::size_t in_channels, std::size_t out_channels,
                    const ConvGeometry& geom, bool with_bias, Rng& rng) {
  geom.validate();
  Conv2d conv;
  conv.geom = geom;
  // He initialization for ReLU networks.
  conv.weight = fan_in_normal({out_channels, in_channels, geom.kernel_h, geom.kernel_w},
                              in_channels * geom.kernel_h * geom.kernel_w, 2.0, rng);
  if (with_bias) {
    conv.bias = Tensor(Shape{out_channels}, 0.0f);
    conv.bias.set_requires_grad(true);
  }
  return conv;
}

void Conv2d::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".weight", weight, true);
  if (bias.defined()) fn(prefix + ".bias", bias, true);
}

void BatchNorm2d::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".gamma", state.gamma, true);
  fn(prefix + ".beta", state.beta, true);
  fn(prefix + ".running_mean", state.running_mean, false);
  fn(prefix + ".running_var", state.running_var, false);
}

void BatchNorm2d::reset_statistics() {
  for (auto& v : state.running_mean.mutable_values()) v = 0.0f;
  for (auto& v : state.running_var.mutable_values()) v = 1.0f;
}

Linear Linear::make(std::size_t in_features, std::size_t out_features, Rng& rng) {
  Linear lin;
  lin.weight = fan_in_normal({in_features, out_features}, in_features, 1.0, rng);
  lin.bias = Tensor(Shape{out_features}, 0.0f);
  lin.bias.set_requires_grad(true);
  return lin;
}

void Linear::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".weight", weight, true);
  fn(prefix + ".bias", bias, true);
}

MultiscaleAdapter MultiscaleAdapter::make(std::size_t per_branch_channels, Rng& rng) {
  if (per_branch_channels == 0) throw ShapeError("multiscale adapter: per-branch channels must be >= 1");
  MultiscaleAdapter adapter;
  for (std::size_t d : kDilations) {
    adapter.branches.push_back(
        Conv2d::make(1, per_branch_channels, ConvGeometry::square(kKernel, 1, d, d), true, rng));
  }
  return adapter;
}

Tensor MultiscaleAdapter::forward(const Tensor& x) const {
  if (x.rank() != 4 || x.dim(1) != 1) {
    throw ShapeError("multiscale adapter: expects [N,1,H,W], got " + shape_to_string(x.shape()));
  }
  std::vector<Tensor> outs;
  outs.reserve(branches.size());
  for (const auto& branch : branches) outs.push_back(branch.forward(x));
  return channel_concat<float>(outs);
}

void MultiscaleAdapter::visit(const std::string& prefix, const ParamVisitor& fn) {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    branches[i].visit(prefix + ".dilation" + std::to_string(branches[i].geom.dilation), fn);
  }
}

std::size_t MultiscaleAdapter::out_channels() const {
  std::size_t total = 0;
  for (const auto& b : branches) total += b.out_channels();
  return total;
}

}  // namespace specnet
