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

#include "specnet/train/early_stopping.hpp"

#include <stdexcept>

namespace specnet {

EarlyStopping::EarlyStopping(std::size_t patience) : patience_(patience) {
  if (patience == 0) throw std::invalid_argument("early stopping: patience must be >= 1");
}

bool EarlyStopping::observe(std::size_t epoch, double metric,
                            const std::vector<NamedTensor>& state) {
  if (best_epoch_ == 0 || metric > best_metric_) {
    best_metric_ = metric;
    best_epoch_ = epoch;
    since_ = 0;
    best_.clear();
    best_.reserve(state.size());
    for (const auto& entry : state) best_.push_back({entry.name, entry.tensor.detach()});
  } else {
    ++since_;
  }
  return should_stop();
}

void EarlyStopping::restore(std::vector<NamedTensor>& targets) const {
  if (best_.empty()) throw std::logic_error("early stopping: no snapshot to restore");
  restore_into(best_, targets);
}

FitResult fit_with_early_stopping(std::size_t max_epochs, std::size_t patience,
                                  const std::function<void(std::size_t)>& train_epoch,
                                  const std::function<double(std::size_t)>& validate,
                                  const std::function<std::vector<NamedTensor>()>& state) {
  if (max_epochs == 0) throw std::invalid_argument("fit: max_epochs must be >= 1");
  EarlyStopping stopper(patience);
  FitResult result;
  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    train_epoch(epoch);
    result.epochs_run = epoch;
    if (stopper.observe(epoch, validate(epoch), state())) {
      result.stopped_early = true;
      break;
    }
  }
  auto live = state();
  stopper.restore(live);
  result.best_epoch = stopper.best_epoch();
  result.best_metric = stopper.best_metric();
  return result;
}

}  // namespace specnet
