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

#ifndef SPECNET_AUDIO_NORMALIZER_HPP_
#define SPECNET_AUDIO_NORMALIZER_HPP_

#include <span>
#include <string>
#include <vector>

#include "specnet/audio/mel.hpp"

namespace specnet {

// Per-mel-dimension statistics fitted on a training split.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> variance;  // population variance
  double epsilon = 1e-8;
  NormalizationKind kind = NormalizationKind::kVariance;

  std::size_t n_mels() const { return mean.size(); }
  double divisor(std::size_t mel) const;

  // {"mean": [...], "variance": [...], "epsilon": x}; a "divide_by" key is
  // added only for standard-deviation normalization.
  std::string to_json() const;
  static Normalizer from_json(const std::string& text);
};

Normalizer fit_normalizer(std::span<const Spectrogram> spectrograms, double epsilon,
                          NormalizationKind kind = NormalizationKind::kVariance);

// out[t][m] = (in[t][m] - mean[m]) / divisor[m]. Rejects already-normalized
// input and dimension mismatches.
Spectrogram apply_normalizer(const Normalizer& norm, const Spectrogram& spec);
Spectrogram denormalize(const Normalizer& norm, const Spectrogram& spec);

}  // namespace specnet

#endif  // SPECNET_AUDIO_NORMALIZER_HPP_
