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

#include "specnet/train/optimizer.hpp"

namespace specnet {

Sgd::Sgd(std::vector<ParamGroup> groups) : groups_(std::move(groups)) {
  velocity_.resize(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& group = groups_[g];
    if (group.learning_rate < 0.0 || group.weight_decay < 0.0 || group.momentum < 0.0) {
      throw std::invalid_argument("sgd: group '" + group.name +
                                  "' needs nonnegative lr, weight decay and momentum");
    }
    for (const auto& p : group.params) velocity_[g].emplace_back(p.tensor.numel(), 0.0f);
  }
}

ParamGroup& Sgd::group(const std::string& name) {
  for (auto& g : groups_) {
    if (g.name == name) return g;
  }
  throw std::invalid_argument("sgd: no group '" + name + "'");
}

void Sgd::step() {
  for (const auto& group : groups_) {
    for (const auto& p : group.params) {
      if (!p.tensor.has_grad()) throw OptimizerError("sgd: missing gradient for " + p.name);
    }
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto& group = groups_[g];
    const auto lr = float(group.learning_rate);
    const auto wd = float(group.weight_decay);
    const auto mu = float(group.momentum);
    for (std::size_t i = 0; i < group.params.size(); ++i) {
      auto values = group.params[i].tensor.mutable_values();
      auto grad = group.params[i].tensor.grad();
      auto& v = velocity_[g][i];
      for (std::size_t k = 0; k < values.size(); ++k) {
        v[k] = mu * v[k] + (grad[k] + wd * values[k]);
        values[k] -= lr * v[k];
      }
    }
  }
}

void Sgd::zero_grad() {
  for (auto& group : groups_) {
    for (auto& p : group.params) p.tensor.zero_grad();
  }
}

std::vector<ParamGroup> single_group(Model& model, GroupSettings settings, double momentum) {
  ParamGroup all{"all", {}, settings.learning_rate, settings.weight_decay, momentum};
  for (auto& p : model.parameters()) {
    if (p.trainable) all.params.push_back({p.name, p.tensor});
  }
  return {std::move(all)};
}

std::vector<ParamGroup> head_body_groups(Model& model, GroupSettings head, GroupSettings body,
                                         double momentum) {
  ParamGroup h{"head", {}, head.learning_rate, head.weight_decay, momentum};
  ParamGroup b{"body", {}, body.learning_rate, body.weight_decay, momentum};
  for (auto& p : model.parameters()) {
    if (!p.trainable) continue;
    (p.group == ParamGroupTag::kHead ? h : b).params.push_back({p.name, p.tensor});
  }
  return {std::move(h), std::move(b)};
}

}  // namespace specnet
