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

#ifndef SPECNET_TRAIN_TRAINER_HPP_
#define SPECNET_TRAIN_TRAINER_HPP_

#include <cstddef>
#include <random>

#include "specnet/models/model.hpp"
#include "specnet/train/features.hpp"
#include "specnet/train/optimizer.hpp"

namespace specnet {

struct EpochMetrics {
  double loss = 0.0;      // mean over examples
  double accuracy = 0.0;  // on the training batches, train-mode forward
  std::size_t batches = 0;
};

struct Metrics {
  double accuracy = 0.0;
  double loss = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

std::size_t batch_count(std::size_t examples, std::size_t batch_size);

// Shuffles with `rng`, then one optimizer step per batch.
EpochMetrics train_epoch(Model& model, const LabeledSet& split, Sgd& optimizer,
                         std::size_t batch_size, std::mt19937_64& rng);

// Eval-mode forward without graph recording; touches no model state.
Metrics evaluate(Model& model, const LabeledSet& split, std::size_t batch_size = 64);

}  // namespace specnet

#endif  // SPECNET_TRAIN_TRAINER_HPP_
