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

#ifndef SPECNET_AUDIO_FEATURE_CACHE_HPP_
#define SPECNET_AUDIO_FEATURE_CACHE_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "specnet/audio/mel.hpp"

namespace specnet {

// On-disk layout, little-endian:
//   "MELF" | u32 version (1) | u32 n_frames | u32 n_mels | f32[n_frames*n_mels]
// with values frame-major. The header is 16 bytes.
inline constexpr std::uint32_t kFeatureCacheVersion = 1;
inline constexpr std::size_t kFeatureCacheHeaderBytes = 16;

class FeatureCacheError : public std::runtime_error {
 public:
  enum class Kind { kUnreadable, kBadMagic, kVersionMismatch, kTruncated };
  FeatureCacheError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<char> encode_feature_cache(const Spectrogram& spec);
Spectrogram decode_feature_cache(const std::vector<char>& bytes);

void write_feature_cache(const Spectrogram& spec, const std::filesystem::path& path);
Spectrogram read_feature_cache(const std::filesystem::path& path);

}  // namespace specnet

#endif  // SPECNET_AUDIO_FEATURE_CACHE_HPP_
