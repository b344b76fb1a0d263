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

#ifndef SPECNET_TRAIN_OPTIMIZER_HPP_
#define SPECNET_TRAIN_OPTIMIZER_HPP_

#include <string>
#include <vector>

#include "specnet/models/model.hpp"

namespace specnet {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamGroup {
  std::string name;
  std::vector<NamedTensor> params;
  double learning_rate = 0.01;  // 0 freezes the group
  double weight_decay = 0.0;
  double momentum = 0.9;
};

// SGD with heavy-ball momentum, weight decay folded into the gradient:
//   v <- momentum * v + (grad + wd * p);  p <- p - lr * v
class Sgd {
 public:
  explicit Sgd(std::vector<ParamGroup> groups);

  // Throws OptimizerError naming the first parameter without a gradient.
  void step();
  void zero_grad();

  const std::vector<ParamGroup>& groups() const { return groups_; }
  ParamGroup& group(const std::string& name);
  const std::vector<float>& velocity(std::size_t group, std::size_t param) const {
    return velocity_[group][param];
  }

 private:
  std::vector<ParamGroup> groups_;
  std::vector<std::vector<std::vector<float>>> velocity_;
};

struct GroupSettings {
  double learning_rate;
  double weight_decay;
};

// One group holding every trainable tensor.
std::vector<ParamGroup> single_group(Model& model, GroupSettings settings, double momentum);
// "head" and "body" groups split by parameter tag, head first.
std::vector<ParamGroup> head_body_groups(Model& model, GroupSettings head, GroupSettings body,
                                         double momentum);

}  // namespace specnet

#endif  // SPECNET_TRAIN_OPTIMIZER_HPP_
