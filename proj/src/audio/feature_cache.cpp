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

#include "specnet/audio/feature_cache.hpp"

#include "specnet/util/io.hpp"

namespace specnet {

std::vector<char> encode_feature_cache(const Spectrogram& spec) {
  if (spec.data.size() != spec.n_frames * spec.n_mels) {
    throw std::invalid_argument("feature cache: spectrogram data size mismatch");
  }
  ByteWriter out;
  out.raw("MELF");
  out.u32(kFeatureCacheVersion);
  out.u32(std::uint32_t(spec.n_frames));
  out.u32(std::uint32_t(spec.n_mels));
  for (float v : spec.data) out.f32(v);
  return out.take();
}

Spectrogram decode_feature_cache(const std::vector<char>& bytes) {
  using Kind = FeatureCacheError::Kind;
  ByteReader in(bytes);
  try {
    if (in.raw(4) != "MELF") throw FeatureCacheError(Kind::kBadMagic, "feature cache: bad magic");
    const std::uint32_t version = in.u32();
    if (version != kFeatureCacheVersion) {
      throw FeatureCacheError(Kind::kVersionMismatch,
                              "feature cache: version " + std::to_string(version) +
                                  ", expected " + std::to_string(kFeatureCacheVersion));
    }
    Spectrogram spec;
    spec.n_frames = in.u32();
    spec.n_mels = in.u32();
    const std::size_t count = spec.n_frames * spec.n_mels;
    if (in.remaining() != count * 4) {
      throw FeatureCacheError(Kind::kTruncated,
                              "feature cache: payload holds " + std::to_string(in.remaining()) +
                                  " bytes, header promises " + std::to_string(count * 4));
    }
    spec.data.resize(count);
    for (auto& v : spec.data) v = in.f32();
    return spec;
  } catch (const ByteReader::Truncated&) {
    throw FeatureCacheError(Kind::kTruncated, "feature cache: truncated header");
  }
}

void write_feature_cache(const Spectrogram& spec, const std::filesystem::path& path) {
  write_file_atomic(path, encode_feature_cache(spec));
}

Spectrogram read_feature_cache(const std::filesystem::path& path) {
  std::vector<char> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const IoError& e) {
    throw FeatureCacheError(FeatureCacheError::Kind::kUnreadable, e.what());
  }
  return decode_feature_cache(bytes);
}

}  // namespace specnet
