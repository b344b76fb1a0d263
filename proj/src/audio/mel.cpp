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

#include "specnet/audio/mel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace specnet {

namespace {
// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void FeatureConfig::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("features: sample_rate must be positive");
  if (frame_length == 0 || (frame_length & (frame_length - 1)) != 0) {
    throw std::invalid_argument("features: frame_length must be a power of two");
  }
  if (hop_length == 0 || hop_length > frame_length) {
    throw std::invalid_argument("features: hop_length must be in [1, frame_length]");
  }
  if (n_mels < 1) throw std::invalid_argument("features: n_mels must be >= 1");
  if (!(fmin >= 0.0) || !(fmin < resolved_fmax()) || resolved_fmax() > sample_rate / 2.0) {
    throw std::invalid_argument("features: require 0 <= fmin < fmax <= sample_rate / 2");
  }
  if (!(epsilon >= 0.0)) throw std::invalid_argument("features: epsilon must be >= 0");
}

std::string FeatureConfig::fingerprint() const {
  std::ostringstream out;
  out << std::setprecision(17) << "sr=" << sample_rate << ";frame=" << frame_length
      << ";hop=" << hop_length << ";mels=" << n_mels << ";fmin=" << fmin
      << ";fmax=" << resolved_fmax() << ";eps=" << epsilon << ";log=" << log_compress;
  return out.str();
}

double MelFilterbank::hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelFilterbank::mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t fft_length,
                             double sample_rate, double fmin, double fmax)
    : n_mels_(n_mels), n_bins_(fft_length / 2 + 1) {
  if (n_mels == 0) throw std::invalid_argument("mel filterbank: n_mels must be >= 1");
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  edges_hz_.resize(n_mels + 2);
  for (std::size_t i = 0; i < edges_hz_.size(); ++i) {
    edges_hz_[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) / double(n_mels + 1));
  }
  edges_hz_.front() = fmin;
  edges_hz_.back() = fmax;

  weights_.assign(n_mels * n_bins_, 0.0);
  first_bin_.assign(n_mels, n_bins_);
  last_bin_.assign(n_mels, 0);
  const double bin_hz = sample_rate / double(fft_length);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges_hz_[m], centre = edges_hz_[m + 1], hi = edges_hz_[m + 2];
    for (std::size_t k = 0; k < n_bins_; ++k) {
      const double f = double(k) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= centre) {
        w = (f - lo) / (centre - lo);
      } else if (f > centre && f < hi) {
        w = (hi - f) / (hi - centre);
      }
      if (w > 0.0) {
        weights_[m * n_bins_ + k] = w;
        first_bin_[m] = std::min(first_bin_[m], k);
        last_bin_[m] = std::max(last_bin_[m], k);
      }
    }
  }
}

void MelFilterbank::apply(const double* power, float* out) const {
  for (std::size_t m = 0; m < n_mels_; ++m) {
    double acc = 0.0;
    const double* w = weights_.data() + m * n_bins_;
    for (std::size_t k = first_bin_[m]; k <= last_bin_[m] && k < n_bins_; ++k) acc += w[k] * power[k];
    out[m] = float(acc);
  }
}

struct MelSpectrogramExtractor::FftState {
  std::size_t length;
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit FftState(std::size_t n) : length(n) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(int(n), in, out, FFTW_ESTIMATE);
  }
  ~FftState() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
};

MelSpectrogramExtractor::MelSpectrogramExtractor(const FeatureConfig& config)
    : config_((config.validate(), config)),
      filterbank_(config.n_mels, config.frame_length, config.sample_rate, config.fmin,
                  config.resolved_fmax()),
      window_(config.frame_length),
      fft_(std::make_unique<FftState>(config.frame_length)) {
  // Periodic Hann window.
  const double n = double(config.frame_length);
  for (std::size_t i = 0; i < window_.size(); ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / n);
  }
}

MelSpectrogramExtractor::~MelSpectrogramExtractor() = default;

Spectrogram MelSpectrogramExtractor::extract(const PcmSignal& signal) const {
  if (signal.samples.empty()) throw std::invalid_argument("mel spectrogram: empty signal");
  if (signal.sample_rate != config_.sample_rate) {
    throw std::invalid_argument("mel spectrogram: signal rate " +
                                std::to_string(signal.sample_rate) + " != configured " +
                                std::to_string(config_.sample_rate));
  }
  const std::size_t frame = config_.frame_length;
  Spectrogram spec;
  spec.n_frames = expected_frame_count(signal.samples.size(), config_);
  spec.n_mels = config_.n_mels;
  spec.data.resize(spec.n_frames * spec.n_mels);

  const std::size_t bins = frame / 2 + 1;
  std::vector<double> power(bins);
  // fftw_malloc alignment matches the planning buffers, as new-array
  // execution requires.
  std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(frame), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(bins), &fftw_free);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const std::size_t start = t * config_.hop_length;
    for (std::size_t i = 0; i < frame; ++i) {
      const std::size_t at = start + i;
      const double x = at < signal.samples.size() ? signal.samples[at] : 0.0;
      in.get()[i] = x * window_[i];
    }
    fftw_execute_dft_r2c(fft_->plan, in.get(), out.get());
    for (std::size_t k = 0; k < bins; ++k) {
      const fftw_complex& c = out.get()[k];
      power[k] = c[0] * c[0] + c[1] * c[1];
    }
    float* row = spec.data.data() + t * spec.n_mels;
    filterbank_.apply(power.data(), row);
    if (config_.log_compress) {
      for (std::size_t m = 0; m < spec.n_mels; ++m) {
        row[m] = float(std::log10(double(row[m]) + config_.epsilon));
      }
    }
  }
  return spec;
}

Spectrogram extract_mel_spectrogram(const PcmSignal& signal, const FeatureConfig& config) {
  return MelSpectrogramExtractor(config).extract(signal);
}

std::size_t expected_frame_count(std::size_t n_samples, const FeatureConfig& config) {
  const std::size_t length = std::max(n_samples, config.frame_length);
  return (length - config.frame_length) / config.hop_length + 1;
}

PcmSignal fit_to_duration(const PcmSignal& signal, double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("fit_to_duration: seconds must be > 0");
  PcmSignal out;
  out.sample_rate = signal.sample_rate;
  const auto target = std::size_t(std::llround(seconds * signal.sample_rate));
  out.samples.assign(target, 0.0f);
  std::copy_n(signal.samples.begin(), std::min(target, signal.samples.size()),
              out.samples.begin());
  return out;
}

}  // namespace specnet
