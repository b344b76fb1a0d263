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

#ifndef SPECNET_TRAIN_EARLY_STOPPING_HPP_
#define SPECNET_TRAIN_EARLY_STOPPING_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "specnet/tensor/checkpoint.hpp"

namespace specnet {

// Tracks the best validation metric. Only a strict improvement resets the
// counter, so ties keep the earlier epoch.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  // Records epoch `epoch` (1-based). Snapshots `state` on improvement and
  // returns true once `patience` epochs in a row failed to improve.
  bool observe(std::size_t epoch, double metric, const std::vector<NamedTensor>& state);

  std::size_t patience() const { return patience_; }
  double best_metric() const { return best_metric_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs_since_improvement() const { return since_; }
  const std::vector<NamedTensor>& best_checkpoint() const { return best_; }
  bool should_stop() const { return best_epoch_ > 0 && since_ >= patience_; }

  // Copies the snapshot back into live tensors.
  void restore(std::vector<NamedTensor>& targets) const;

 private:
  std::size_t patience_;
  double best_metric_ = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t since_ = 0;
  std::vector<NamedTensor> best_;
};

struct FitResult {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
  bool stopped_early = false;
};

// Runs train_epoch/validate for up to max_epochs, stopping on patience, then
// reloads the best snapshot into the tensors returned by `state`.
FitResult fit_with_early_stopping(std::size_t max_epochs, std::size_t patience,
                                  const std::function<void(std::size_t)>& train_epoch,
                                  const std::function<double(std::size_t)>& validate,
                                  const std::function<std::vector<NamedTensor>()>& state);

}  // namespace specnet

#endif  // SPECNET_TRAIN_EARLY_STOPPING_HPP_
