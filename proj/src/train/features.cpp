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

#include "specnet/train/features.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "specnet/audio/feature_cache.hpp"
#include "specnet/audio/resample.hpp"
#include "specnet/audio/wav.hpp"

namespace specnet {

namespace fs = std::filesystem;

Spectrogram FeaturePipeline::compute(const fs::path& audio) const {
  PcmSignal signal = decode_wav(audio);
  if (signal.sample_rate != config.sample_rate) signal = resample(signal, config.sample_rate);
  if (clip_seconds > 0.0) signal = fit_to_duration(signal, clip_seconds);
  return extract_mel_spectrogram(signal, config);
}

double default_clip_seconds(Task task) { return task == Task::kUs8k ? 4.0 : 1.0; }

std::string feature_cache_key(const fs::path& audio, const FeaturePipeline& pipeline) {
  std::ostringstream material;
  material << fs::absolute(audio).lexically_normal().string() << '\n'
           << pipeline.config.fingerprint() << "\nclip=" << pipeline.clip_seconds;
  const std::string text = material.str();
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

const Spectrogram& FeatureStore::at(const std::string& id) const {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw std::out_of_range("no features for example " + id);
  return it->second;
}

FeatureStore featurize(const Dataset& dataset, const FeaturePipeline& pipeline,
                       const std::optional<fs::path>& cache_dir, std::size_t jobs) {
  pipeline.config.validate();
  if (cache_dir) fs::create_directories(*cache_dir);
  const std::size_t n = dataset.examples.size();
  std::vector<Spectrogram> results(n);
  std::vector<fs::path> paths(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const Example& e = dataset.examples[i];
      try {
        if (cache_dir) {
          paths[i] = *cache_dir / (feature_cache_key(e.audio_path, pipeline) + ".melf");
          if (fs::exists(paths[i])) {
            results[i] = read_feature_cache(paths[i]);
            continue;
          }
        }
        results[i] = pipeline.compute(e.audio_path);
        if (cache_dir) write_feature_cache(results[i], paths[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  FeatureStore store;
  for (std::size_t i = 0; i < n; ++i) {
    const Example& e = dataset.examples[i];
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& ex) {
        throw std::runtime_error("featurize " + e.audio_path.string() + ": " + ex.what());
      }
    }
    store.by_id.emplace(e.id, std::move(results[i]));
    if (cache_dir) store.cache_paths.emplace(e.id, paths[i]);
  }
  return store;
}

LabeledSet make_labeled_set(const std::vector<Example>& examples, const FeatureStore& store,
                            const std::optional<Normalizer>& norm) {
  LabeledSet set;
  set.features.reserve(examples.size());
  for (const auto& e : examples) {
    const Spectrogram& s = store.at(e.id);
    set.features.push_back(norm ? apply_normalizer(*norm, s) : s);
    set.labels.push_back(e.label);
  }
  return set;
}

Normalizer fit_on(const std::vector<Example>& examples, const FeatureStore& store,
                  const FeatureConfig& config) {
  std::vector<Spectrogram> specs;
  specs.reserve(examples.size());
  for (const auto& e : examples) specs.push_back(store.at(e.id));
  return fit_normalizer(specs, config.epsilon, config.normalization);
}

Tensor make_batch(const LabeledSet& set, std::span<const std::size_t> rows,
                  std::vector<int>* labels) {
  if (rows.empty()) throw std::invalid_argument("make_batch: empty batch");
  const Spectrogram& first = set.features.at(rows[0]);
  const std::size_t per = first.n_frames * first.n_mels;
  std::vector<float> values;
  values.reserve(rows.size() * per);
  if (labels) labels->clear();
  for (std::size_t r : rows) {
    const Spectrogram& s = set.features.at(r);
    if (s.n_frames != first.n_frames || s.n_mels != first.n_mels) {
      throw ShapeError("make_batch: spectrograms differ in shape (" +
                       std::to_string(s.n_frames) + "x" + std::to_string(s.n_mels) + " vs " +
                       std::to_string(first.n_frames) + "x" + std::to_string(first.n_mels) + ")");
    }
    values.insert(values.end(), s.data.begin(), s.data.end());
    if (labels) labels->push_back(set.labels[r]);
  }
  return Tensor({rows.size(), 1, first.n_frames, first.n_mels}, std::move(values));
}

}  // namespace specnet
