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

#ifndef SPECNET_TRAIN_EXPERIMENTS_HPP_
#define SPECNET_TRAIN_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specnet/data/dataset.hpp"
#include "specnet/models/model.hpp"
#include "specnet/train/features.hpp"
#include "specnet/train/report.hpp"

namespace specnet {

struct TrainSettings {
  std::size_t batch_size = 64;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t patience = 10;
  std::size_t max_epochs = 500;
};

struct TransferSettings {
  std::size_t epochs = 100;
  double head_lr = 0.005;
  double head_wd = 1e-4;
  double body_lr = 0.001;
  double body_wd = 0.0;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  // Batchnorm running statistics from the source model are kept unless set.
  bool reset_batchnorm = false;
};

// Source checkpoints keyed by whether the model carries the adapter.
struct SourceCheckpoints {
  std::filesystem::path plain;
  std::filesystem::path multiscale;

  const std::filesystem::path& for_multiscale(bool multiscale) const {
    return multiscale ? this->multiscale : plain;
  }
};

struct CrossvalConfig {
  ModelSpec model;
  TrainSettings train;
  std::uint64_t seed = 0;
  std::vector<int> folds;  // test folds to run; empty means all ten
  // Fold whose best-epoch model is saved when checkpoint_path is set.
  int checkpoint_fold = 1;
  std::filesystem::path checkpoint_path;
  std::size_t jobs = 1;
};

enum class Init { kFresh, kPretrained };
std::string to_string(Init init);
Init parse_init(const std::string& text);

struct TransferConfig {
  ModelSpec model;  // num_classes is taken from each task
  TransferSettings transfer;
  std::uint64_t seed = 0;
  std::vector<Task> tasks = {Task::kScLr2, Task::kScCore20, Task::kScAll30};
  std::vector<Init> inits = {Init::kFresh, Init::kPretrained};
  std::vector<bool> multiscale = {false, true};
  SourceCheckpoints sources;
  std::size_t jobs = 1;
};

struct AblationConfig {
  ModelSpec model;
  TransferSettings transfer;
  std::uint64_t seed = 0;  // model initialization, fixed across iterations
  std::uint64_t seed_base = 0;  // subset and shuffle seed = seed_base + iteration
  std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::size_t iterations = 5;
  Init init = Init::kFresh;
  std::filesystem::path source_checkpoint;
  std::size_t jobs = 1;
};

// A loaded dataset with its features. Transfer and ablation take one per task.
struct PreparedData {
  Dataset dataset;
  FeatureStore features;
  FeatureConfig feature_config;
};

// Ten-fold protocol: train on eight folds, early-stop on the validation
// fold, reload the best epoch and score the held-out fold.
Report run_crossval(const CrossvalConfig& config, const PreparedData& data);

using TaskDataProvider = std::function<const PreparedData&(Task)>;
// Sweep over tasks x inits x multiscale, each trained for a fixed number of
// epochs with separate head and body learning rates.
Report run_transfer(const TransferConfig& config, const TaskDataProvider& data);

// Trains on stratified fractions of the training (and validation) split and
// always tests on the complete test split.
Report run_ablation(const AblationConfig& config, const PreparedData& data);

// Builds the starting model for a transfer run: a fresh model, or the source
// checkpoint with a new head for `num_classes`.
Model make_transfer_model(const ModelSpec& spec, Init init, const std::filesystem::path& source,
                          std::size_t num_classes, std::uint64_t seed, bool reset_batchnorm);

// Runs fn(0..n-1) on up to `jobs` threads; the first failure by index is
// rethrown after all tasks finish.
void run_parallel(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace specnet

#endif  // SPECNET_TRAIN_EXPERIMENTS_HPP_
