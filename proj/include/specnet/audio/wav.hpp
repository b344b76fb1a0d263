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

#ifndef SPECNET_AUDIO_WAV_HPP_
#define SPECNET_AUDIO_WAV_HPP_

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specnet {

// Mono audio with amplitudes nominally in [-1, 1].
struct PcmSignal {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
  // Throws std::invalid_argument on a non-positive rate or non-finite sample.
  void validate() const;
};

class DecodeError : public std::runtime_error {
 public:
  enum class Kind {
    kUnreadable,           // file missing or not readable
    kMalformed,            // not RIFF/WAVE, or truncated structure
    kUnsupportedEncoding,  // format tag, bit depth or channel count
    kEmptyPayload,         // data chunk holds no frames
  };
  DecodeError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Decodes RIFF/WAVE PCM (8/16/24/32-bit integer or 32-bit float, including
// WAVE_FORMAT_EXTENSIBLE) with one or two channels. Stereo is averaged to mono.
PcmSignal decode_wav(const std::filesystem::path& path);
PcmSignal decode_wav_bytes(std::span<const char> bytes);

enum class WavEncoding { kPcm16, kFloat32 };

// Interleaved multi-channel encoder, used for fixtures and tests.
std::vector<char> encode_wav(const std::vector<std::vector<float>>& channels,
                             int sample_rate, WavEncoding encoding);
void write_wav(const std::filesystem::path& path, const PcmSignal& signal,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace specnet

#endif  // SPECNET_AUDIO_WAV_HPP_
