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

#include "specnet/tensor/tensor.hpp"

#include <sstream>
#include <unordered_set>
#include <utility>

namespace specnet {

namespace {
thread_local bool grad_mode_enabled = true;
}  // namespace

bool GradMode::enabled() { return grad_mode_enabled; }
void GradMode::set_enabled(bool enabled) { grad_mode_enabled = enabled; }

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill)
    : node_(std::make_shared<Node>()) {
  node_->values.assign(shape_numel(shape), fill);
  node_->shape = std::move(shape);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values)
    : node_(std::make_shared<Node>()) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("tensor: shape " + shape_to_string(shape) + " holds " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  node_->shape = std::move(shape);
  node_->values = std::move(values);
}

template <typename T>
const Shape& BasicTensor<T>::shape() const {
  if (!node_) throw ShapeError("tensor: use of undefined tensor");
  return node_->shape;
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw ShapeError("tensor: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_to_string(s));
  }
  return s[axis];
}

template <typename T>
std::size_t BasicTensor<T>::numel() const {
  return node_ ? node_->values.size() : 0;
}

template <typename T>
std::span<const T> BasicTensor<T>::values() const {
  if (!node_) return {};
  return node_->values;
}

template <typename T>
std::span<T> BasicTensor<T>::mutable_values() {
  if (!node_) return {};
  return node_->values;
}

template <typename T>
T BasicTensor<T>::item() const {
  if (numel() != 1) {
    throw ShapeError("tensor: item() on shape " + shape_to_string(shape()));
  }
  return node_->values[0];
}

template <typename T>
bool BasicTensor<T>::requires_grad() const {
  return node_ && node_->requires_grad;
}

template <typename T>
BasicTensor<T>& BasicTensor<T>::set_requires_grad(bool enabled) {
  if (!node_) throw ShapeError("tensor: use of undefined tensor");
  node_->requires_grad = enabled;
  return *this;
}

template <typename T>
bool BasicTensor<T>::is_leaf() const {
  return !node_ || !node_->backward_fn;
}

template <typename T>
bool BasicTensor<T>::has_grad() const {
  return node_ && node_->grad.size() == node_->values.size() &&
         !node_->values.empty();
}

template <typename T>
std::span<const T> BasicTensor<T>::grad() const {
  if (!has_grad()) return {};
  return node_->grad;
}

template <typename T>
std::span<T> BasicTensor<T>::mutable_grad() {
  if (!node_) return {};
  return node_->grad_buffer();
}

template <typename T>
void BasicTensor<T>::zero_grad() {
  if (node_) node_->grad.assign(node_->values.size(), T(0));
}

template <typename T>
void BasicTensor<T>::backward() const {
  if (!node_) throw ShapeError("backward: undefined root");
  if (node_->values.size() != 1) {
    throw ShapeError("backward: root must be a scalar, got shape " +
                     shape_to_string(node_->shape));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order without recursion
  // depth limits on deep networks.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* node : order) {
    if (node->backward_fn) node->grad.assign(node->values.size(), T(0));
  }
  node_->grad_buffer()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn) node->backward_fn(*node);
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::clone() const {
  if (!node_) return {};
  BasicTensor out(node_->shape, node_->values);
  out.node_->requires_grad = node_->requires_grad && is_leaf();
  return out;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::detach() const {
  if (!node_) return {};
  return BasicTensor(node_->shape, node_->values);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::from_op(Shape shape, std::vector<T> values,
                                       std::vector<BasicTensor> parents,
                                       std::function<void(Node&)> backward_fn) {
  BasicTensor out(std::move(shape), std::move(values));
  if (!GradMode::enabled()) return out;
  bool any = false;
  for (const auto& p : parents) any = any || p.requires_grad();
  if (!any) return out;
  out.node_->requires_grad = true;
  out.node_->parents.reserve(parents.size());
  for (auto& p : parents) out.node_->parents.push_back(p.node_);
  out.node_->backward_fn = std::move(backward_fn);
  return out;
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace specnet
