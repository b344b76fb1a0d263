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

#ifndef SPECNET_AUDIO_MEL_HPP_
#define SPECNET_AUDIO_MEL_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "specnet/audio/wav.hpp"

namespace specnet {

// Divisor used when normalizing a feature dimension.
enum class NormalizationKind { kVariance, kStdDev };

struct FeatureConfig {
  int sample_rate = 22050;
  std::size_t frame_length = 1024;  // 46.4 ms at 22050 Hz
  std::size_t hop_length = 512;     // 50% overlap
  std::size_t n_mels = 64;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 selects sample_rate / 2
  double epsilon = 1e-8;
  bool log_compress = false;  // log10(energy + epsilon) when set
  NormalizationKind normalization = NormalizationKind::kVariance;

  double resolved_fmax() const { return fmax > 0.0 ? fmax : sample_rate / 2.0; }
  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  // Stable textual form used for cache keys and config echoes.
  std::string fingerprint() const;
};

// Frames x mel bands, row-major (time on the first axis).
struct Spectrogram {
  std::vector<float> data;
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  bool normalized = false;

  float at(std::size_t frame, std::size_t mel) const { return data[frame * n_mels + mel]; }
};

// Triangular filters on the HTK mel scale, mel(f) = 2595 log10(1 + f/700).
// Adjacent filters overlap by half: filter m rises from centre m-1 to centre m
// and falls to zero at centre m+1.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_mels, std::size_t fft_length, double sample_rate,
                double fmin, double fmax);

  std::size_t n_mels() const { return n_mels_; }
  std::size_t n_bins() const { return n_bins_; }
  // Dense [n_mels x n_bins] weight matrix.
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t mel, std::size_t bin) const { return weights_[mel * n_bins_ + bin]; }
  // Centre frequencies including the two outer edge points (n_mels + 2 values).
  const std::vector<double>& edges_hz() const { return edges_hz_; }

  void apply(const double* power, float* out) const;

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

 private:
  std::size_t n_mels_;
  std::size_t n_bins_;
  std::vector<double> weights_;
  std::vector<double> edges_hz_;
  std::vector<std::size_t> first_bin_;
  std::vector<std::size_t> last_bin_;
};

// Reusable extractor owning an FFT plan. extract() may be called concurrently.
class MelSpectrogramExtractor {
 public:
  explicit MelSpectrogramExtractor(const FeatureConfig& config);
  ~MelSpectrogramExtractor();
  MelSpectrogramExtractor(const MelSpectrogramExtractor&) = delete;
  MelSpectrogramExtractor& operator=(const MelSpectrogramExtractor&) = delete;

  Spectrogram extract(const PcmSignal& signal) const;
  const MelFilterbank& filterbank() const { return filterbank_; }

 private:
  struct FftState;
  FeatureConfig config_;
  MelFilterbank filterbank_;
  std::vector<double> window_;
  std::unique_ptr<FftState> fft_;
};

// n_frames = floor((len - frame_length) / hop_length) + 1 after clips shorter
// than one frame are zero-padded to frame_length.
Spectrogram extract_mel_spectrogram(const PcmSignal& signal,
                                    const FeatureConfig& config);

std::size_t expected_frame_count(std::size_t n_samples, const FeatureConfig& config);

// Truncates or zero-pads (at the end) to exactly round(seconds * rate) samples.
PcmSignal fit_to_duration(const PcmSignal& signal, double seconds);

}  // namespace specnet

#endif  // SPECNET_AUDIO_MEL_HPP_
