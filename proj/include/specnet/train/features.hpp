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

#ifndef SPECNET_TRAIN_FEATURES_HPP_
#define SPECNET_TRAIN_FEATURES_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specnet/audio/mel.hpp"
#include "specnet/audio/normalizer.hpp"
#include "specnet/data/dataset.hpp"
#include "specnet/tensor/tensor.hpp"

namespace specnet {

// Decode -> resample -> pad/trim to clip_seconds -> mel spectrogram.
struct FeaturePipeline {
  FeatureConfig config;
  double clip_seconds = 4.0;

  Spectrogram compute(const std::filesystem::path& audio) const;
};

double default_clip_seconds(Task task);

// Hex digest naming the cache entry for `audio` under `pipeline`; any change
// to the path or a feature setting yields a different key.
std::string feature_cache_key(const std::filesystem::path& audio, const FeaturePipeline& pipeline);

struct FeatureStore {
  std::map<std::string, Spectrogram> by_id;
  // Cache file per example id, filled when a cache directory was used.
  std::map<std::string, std::filesystem::path> cache_paths;

  const Spectrogram& at(const std::string& id) const;
};

// Computes (or loads from `cache_dir`) features for every example, using up
// to `jobs` worker threads.
FeatureStore featurize(const Dataset& dataset, const FeaturePipeline& pipeline,
                       const std::optional<std::filesystem::path>& cache_dir, std::size_t jobs);

// Normalized, labeled feature matrices ready for batching.
struct LabeledSet {
  std::vector<Spectrogram> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

// Looks up every example in `store` (throws if one is missing) and applies
// `norm` when given.
LabeledSet make_labeled_set(const std::vector<Example>& examples, const FeatureStore& store,
                            const std::optional<Normalizer>& norm);

Normalizer fit_on(const std::vector<Example>& examples, const FeatureStore& store,
                  const FeatureConfig& config);

// Stacks the selected rows into [B, 1, frames, mels].
Tensor make_batch(const LabeledSet& set, std::span<const std::size_t> rows,
                  std::vector<int>* labels);

}  // namespace specnet

#endif  // SPECNET_TRAIN_FEATURES_HPP_
