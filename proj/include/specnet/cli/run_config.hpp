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

#ifndef SPECNET_CLI_RUN_CONFIG_HPP_
#define SPECNET_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specnet/audio/mel.hpp"
#include "specnet/cli/config.hpp"
#include "specnet/data/dataset.hpp"
#include "specnet/models/model.hpp"
#include "specnet/train/experiments.hpp"

namespace specnet {

// Every configurable knob of the pipeline. Sections: run, data, features,
// model, train, transfer, ablation.
struct RunConfig {
  // [run]
  std::uint64_t seed = 0;
  std::string out = "runs";
  std::string name;  // run subdirectory; empty picks <command>-<utc stamp>-seed<seed>
  std::size_t jobs = 1;
  std::string profile = "full";  // full | desk

  // [data]
  Task dataset = Task::kUs8k;
  std::string root;
  std::string manifest;  // us8k CSV; empty uses <root>/metadata/UrbanSound8K.csv
  std::string cache;     // feature cache dir; empty uses <out>/cache
  double clip_seconds = 0.0;  // 0 picks 4.0 for us8k, 1.0 for speech tasks

  FeatureConfig features;
  ModelSpec model;

  // [train]
  TrainSettings train;
  std::vector<int> folds;
  int checkpoint_fold = 1;
  bool save_checkpoint = true;

  // [transfer]
  TransferSettings transfer;
  std::vector<Task> tasks = {Task::kScLr2, Task::kScCore20, Task::kScAll30};
  std::vector<Init> inits = {Init::kFresh, Init::kPretrained};
  std::vector<bool> multiscale_sweep = {false, true};
  std::string source_checkpoint;
  std::string source_checkpoint_multiscale;

  // [ablation]
  std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::size_t iterations = 5;
  std::optional<std::uint64_t> seed_base;  // unset follows seed
  Init ablation_init = Init::kFresh;

  ConfigTable to_table() const;
  std::string to_text() const;
  // Rejects unknown sections, unknown keys and mistyped values.
  static RunConfig from_table(const ConfigTable& table);
  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  // Applies one "section.key=value" override on top of the current values.
  void set(const std::string& assignment);

  // Cross-field checks; throws ConfigError.
  void validate() const;

  // Fills derived defaults (seed_base, clip length) and, for the desk
  // profile, scales presets and epoch counts down. The result describes the
  // run exactly and records profile "full", so rerunning it changes nothing.
  RunConfig resolved() const;
};

}  // namespace specnet

#endif  // SPECNET_CLI_RUN_CONFIG_HPP_
