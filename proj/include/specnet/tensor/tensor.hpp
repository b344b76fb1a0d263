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

#ifndef SPECNET_TENSOR_TENSOR_HPP_
#define SPECNET_TENSOR_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specnet {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Raised for any shape or argument contract violation inside the tensor core.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Graph recording is on by default and can be switched off per thread, e.g.
// for evaluation passes.
class GradMode {
 public:
  static bool enabled();
  static void set_enabled(bool enabled);
};

class NoGradGuard {
 public:
  NoGradGuard() : previous_(GradMode::enabled()) { GradMode::set_enabled(false); }
  ~NoGradGuard() { GradMode::set_enabled(previous_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Dense row-major array that records the operations producing it so that
// gradients can be propagated back to leaves with requires_grad set.
//
// A BasicTensor is a handle: copies share storage and graph position, in the
// same way framework tensors do. clone() produces an independent leaf.
template <typename T>
class BasicTensor {
 public:
  struct Node {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this node's grad and accumulates into the parents' grads.
    std::function<void(Node&)> backward_fn;

    std::vector<T>& grad_buffer() {
      if (grad.size() != values.size()) grad.assign(values.size(), T(0));
      return grad;
    }
  };

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, T fill = T(0));
  BasicTensor(Shape shape, std::vector<T> values);

  static BasicTensor scalar(T value) { return BasicTensor(Shape{}, {value}); }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const T> values() const;
  // In-place access. Mutating a tensor that feeds a live graph invalidates
  // gradients computed later from that graph.
  std::span<T> mutable_values();
  T item() const;

  bool requires_grad() const;
  BasicTensor& set_requires_grad(bool enabled);
  bool is_leaf() const;

  bool has_grad() const;
  // Empty span when no gradient has been accumulated yet.
  std::span<const T> grad() const;
  std::span<T> mutable_grad();
  void zero_grad();

  // Reverse-mode sweep from a scalar root. Leaf gradients accumulate across
  // calls; interior gradients are recomputed each time.
  void backward() const;

  BasicTensor clone() const;
  BasicTensor detach() const;

  const std::shared_ptr<Node>& node() const { return node_; }

  // Builds an op result. Parents are recorded only while grad mode is on and
  // at least one of them requires a gradient.
  static BasicTensor from_op(Shape shape, std::vector<T> values,
                             std::vector<BasicTensor> parents,
                             std::function<void(Node&)> backward_fn);

 private:
  explicit BasicTensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace specnet

#endif  // SPECNET_TENSOR_TENSOR_HPP_
