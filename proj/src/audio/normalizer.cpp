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

#include "specnet/audio/normalizer.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace specnet {

double Normalizer::divisor(std::size_t mel) const {
  const double spread = kind == NormalizationKind::kStdDev ? std::sqrt(variance[mel]) : variance[mel];
  return spread + epsilon;
}

std::string Normalizer::to_json() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["variance"] = variance;
  j["epsilon"] = epsilon;
  if (kind == NormalizationKind::kStdDev) j["divide_by"] = "stddev";
  return j.dump(2);
}

Normalizer Normalizer::from_json(const std::string& text) {
  Normalizer norm;
  try {
    const auto j = nlohmann::json::parse(text);
    norm.mean = j.at("mean").get<std::vector<double>>();
    norm.variance = j.at("variance").get<std::vector<double>>();
    norm.epsilon = j.at("epsilon").get<double>();
    const std::string divide_by = j.value("divide_by", std::string("variance"));
    if (divide_by == "stddev") {
      norm.kind = NormalizationKind::kStdDev;
    } else if (divide_by != "variance") {
      throw std::invalid_argument("normalizer: unknown divide_by " + divide_by);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("normalizer: ") + e.what());
  }
  if (norm.mean.size() != norm.variance.size()) {
    throw std::invalid_argument("normalizer: mean/variance length mismatch");
  }
  return norm;
}

Normalizer fit_normalizer(std::span<const Spectrogram> spectrograms, double epsilon,
                          NormalizationKind kind) {
  if (spectrograms.empty()) throw std::invalid_argument("fit_normalizer: empty collection");
  const std::size_t n_mels = spectrograms.front().n_mels;
  // Welford accumulation, one running mean/M2 per dimension.
  std::vector<double> mu(n_mels, 0.0), m2(n_mels, 0.0);
  std::size_t count = 0;
  for (const auto& spec : spectrograms) {
    if (spec.n_mels != n_mels) throw std::invalid_argument("fit_normalizer: mixed n_mels");
    for (std::size_t t = 0; t < spec.n_frames; ++t) {
      ++count;
      for (std::size_t m = 0; m < n_mels; ++m) {
        const double x = spec.at(t, m);
        const double delta = x - mu[m];
        mu[m] += delta / double(count);
        m2[m] += delta * (x - mu[m]);
      }
    }
  }
  if (count == 0) throw std::invalid_argument("fit_normalizer: no frames");
  Normalizer norm;
  norm.mean = std::move(mu);
  norm.variance.resize(n_mels);
  for (std::size_t m = 0; m < n_mels; ++m) norm.variance[m] = std::max(0.0, m2[m] / double(count));
  norm.epsilon = epsilon;
  norm.kind = kind;
  return norm;
}

Spectrogram apply_normalizer(const Normalizer& norm, const Spectrogram& spec) {
  if (spec.normalized) throw std::invalid_argument("apply_normalizer: spectrogram already normalized");
  if (spec.n_mels != norm.n_mels()) {
    throw std::invalid_argument("apply_normalizer: spectrogram has " + std::to_string(spec.n_mels) +
                                " mels, normalizer " + std::to_string(norm.n_mels()));
  }
  Spectrogram out = spec;
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    for (std::size_t m = 0; m < spec.n_mels; ++m) {
      float& v = out.data[t * spec.n_mels + m];
      v = float((double(v) - norm.mean[m]) / norm.divisor(m));
    }
  }
  out.normalized = true;
  return out;
}

Spectrogram denormalize(const Normalizer& norm, const Spectrogram& spec) {
  if (!spec.normalized) throw std::invalid_argument("denormalize: spectrogram is not normalized");
  if (spec.n_mels != norm.n_mels()) throw std::invalid_argument("denormalize: dimension mismatch");
  Spectrogram out = spec;
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    for (std::size_t m = 0; m < spec.n_mels; ++m) {
      float& v = out.data[t * spec.n_mels + m];
      v = float(double(v) * norm.divisor(m) + norm.mean[m]);
    }
  }
  out.normalized = false;
  return out;
}

}  // namespace specnet
