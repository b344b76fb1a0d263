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

#include "specnet/train/trainer.hpp"

#include <algorithm>
#include <numeric>

namespace specnet {

std::size_t batch_count(std::size_t examples, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  return (examples + batch_size - 1) / batch_size;
}

EpochMetrics train_epoch(Model& model, const LabeledSet& split, Sgd& optimizer,
                         std::size_t batch_size, std::mt19937_64& rng) {
  if (split.empty()) throw std::invalid_argument("train_epoch: empty split");
  std::vector<std::size_t> order(split.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  EpochMetrics metrics;
  metrics.batches = batch_count(split.size(), batch_size);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::vector<int> labels;
  for (std::size_t b = 0; b < metrics.batches; ++b) {
    const std::size_t begin = b * batch_size;
    const std::size_t end = std::min(split.size(), begin + batch_size);
    const std::span<const std::size_t> rows(order.data() + begin, end - begin);
    Tensor batch = make_batch(split, rows, &labels);

    optimizer.zero_grad();
    Tensor logits = model.forward(batch, Mode::kTrain);
    Tensor loss = cross_entropy_from_logits(logits, std::span<const int>(labels));
    loss.backward();
    optimizer.step();

    loss_sum += double(loss.item()) * double(rows.size());
    const auto predicted = argmax_rows(logits);
    for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i];
  }
  metrics.loss = loss_sum / double(split.size());
  metrics.accuracy = double(correct) / double(split.size());
  return metrics;
}

Metrics evaluate(Model& model, const LabeledSet& split, std::size_t batch_size) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");
  NoGradGuard no_grad;
  Metrics metrics;
  metrics.total = split.size();
  double loss_sum = 0.0;
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (std::size_t begin = 0; begin < split.size(); begin += batch_size) {
    const std::size_t end = std::min(split.size(), begin + batch_size);
    rows.resize(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    Tensor logits = model.forward(make_batch(split, rows, &labels), Mode::kEval);
    loss_sum += double(cross_entropy_from_logits(logits, std::span<const int>(labels)).item()) *
                double(rows.size());
    const auto predicted = argmax_rows(logits);
    for (std::size_t i = 0; i < labels.size(); ++i) metrics.correct += predicted[i] == labels[i];
  }
  metrics.accuracy = double(metrics.correct) / double(metrics.total);
  metrics.loss = loss_sum / double(metrics.total);
  return metrics;
}

}  // namespace specnet
