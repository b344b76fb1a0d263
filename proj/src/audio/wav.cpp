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

#include "specnet/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "specnet/util/io.hpp"

namespace specnet {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

float read_sample(ByteReader& in, const Format& fmt) {
  if (fmt.tag == kFormatFloat) return in.f32();
  switch (fmt.bits) {
    case 8:
      return (float(in.u8()) - 128.0f) / 128.0f;
    case 16:
      return float(std::int16_t(in.u16())) / 32768.0f;
    case 24: {
      std::uint32_t v = in.u8();
      v |= std::uint32_t(in.u8()) << 8;
      v |= std::uint32_t(in.u8()) << 16;
      if (v & 0x800000u) v |= 0xFF000000u;
      return float(double(std::int32_t(v)) / 8388608.0);
    }
    default:
      return float(double(std::int32_t(in.u32())) / 2147483648.0);
  }
}

}  // namespace

void PcmSignal::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("signal: sample rate must be positive");
  for (float s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("signal: non-finite sample");
  }
}

PcmSignal decode_wav_bytes(std::span<const char> bytes) {
  using Kind = DecodeError::Kind;
  ByteReader in(bytes);
  Format fmt;
  bool have_fmt = false;
  try {
    if (in.raw(4) != "RIFF") throw DecodeError(Kind::kMalformed, "wav: missing RIFF header");
    in.u32();
    if (in.raw(4) != "WAVE") throw DecodeError(Kind::kMalformed, "wav: missing WAVE tag");
    while (true) {
      const std::string_view id = in.raw(4);
      const std::uint32_t size = in.u32();
      if (id == "fmt ") {
        if (size < 16) throw DecodeError(Kind::kMalformed, "wav: short fmt chunk");
        ByteReader chunk(std::span<const char>(bytes).subspan(in.position(), std::min<std::size_t>(size, in.remaining())));
        if (chunk.remaining() < size) throw ByteReader::Truncated();
        fmt.tag = chunk.u16();
        fmt.channels = chunk.u16();
        fmt.sample_rate = chunk.u32();
        chunk.u32();
        fmt.block_align = chunk.u16();
        fmt.bits = chunk.u16();
        if (fmt.tag == kFormatExtensible) {
          if (size < 26) throw DecodeError(Kind::kMalformed, "wav: short extensible fmt");
          chunk.skip(8);
          fmt.tag = chunk.u16();
        }
        have_fmt = true;
        in.skip(size + (size & 1));
        continue;
      }
      if (id != "data") {
        in.skip(std::min<std::size_t>(size + (size & 1), in.remaining()));
        continue;
      }
      if (!have_fmt) throw DecodeError(Kind::kMalformed, "wav: data chunk before fmt");
      const bool int_ok = fmt.tag == kFormatPcm &&
                          (fmt.bits == 8 || fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
      const bool float_ok = fmt.tag == kFormatFloat && fmt.bits == 32;
      if (!int_ok && !float_ok) {
        throw DecodeError(Kind::kUnsupportedEncoding,
                          "wav: unsupported encoding (format " + std::to_string(fmt.tag) +
                              ", " + std::to_string(fmt.bits) + " bits)");
      }
      if (fmt.channels < 1 || fmt.channels > 2) {
        throw DecodeError(Kind::kUnsupportedEncoding,
                          "wav: unsupported channel count " + std::to_string(fmt.channels));
      }
      if (fmt.sample_rate == 0) throw DecodeError(Kind::kMalformed, "wav: zero sample rate");
      const std::size_t frame_bytes = std::size_t(fmt.channels) * (fmt.bits / 8);
      // Tolerate a data size that overruns the file (common in truncated
      // recordings) by decoding the whole frames that are present.
      const std::size_t available = std::min<std::size_t>(size, in.remaining());
      const std::size_t frames = available / frame_bytes;
      if (frames == 0) throw DecodeError(Kind::kEmptyPayload, "wav: empty data chunk");
      PcmSignal signal;
      signal.sample_rate = int(fmt.sample_rate);
      signal.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        float acc = 0.0f;
        for (std::uint16_t c = 0; c < fmt.channels; ++c) acc += read_sample(in, fmt);
        signal.samples[f] = acc / float(fmt.channels);
      }
      return signal;
    }
  } catch (const ByteReader::Truncated&) {
    throw DecodeError(Kind::kMalformed, "wav: truncated file");
  }
}

PcmSignal decode_wav(const std::filesystem::path& path) {
  std::vector<char> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const IoError& e) {
    throw DecodeError(DecodeError::Kind::kUnreadable, e.what());
  }
  try {
    return decode_wav_bytes(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(e.kind(), std::string(e.what()) + ": " + path.string());
  }
}

std::vector<char> encode_wav(const std::vector<std::vector<float>>& channels,
                             int sample_rate, WavEncoding encoding) {
  if (channels.empty()) throw std::invalid_argument("encode_wav: no channels");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) throw std::invalid_argument("encode_wav: ragged channels");
  }
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t nch = std::uint16_t(channels.size());
  const std::uint32_t data_size = std::uint32_t(frames * nch * (bits / 8));
  ByteWriter out;
  out.raw("RIFF");
  out.u32(36 + data_size);
  out.raw("WAVE");
  out.raw("fmt ");
  out.u32(16);
  out.u16(encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  out.u16(nch);
  out.u32(std::uint32_t(sample_rate));
  out.u32(std::uint32_t(sample_rate) * nch * (bits / 8));
  out.u16(std::uint16_t(nch * (bits / 8)));
  out.u16(bits);
  out.raw("data");
  out.u32(data_size);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : channels) {
      if (encoding == WavEncoding::kFloat32) {
        out.f32(ch[f]);
      } else {
        const float clamped = std::clamp(ch[f], -1.0f, 1.0f);
        const long q = std::lround(clamped * 32768.0f);
        out.u16(std::uint16_t(std::int16_t(std::clamp(q, -32768L, 32767L))));
      }
    }
  }
  return out.take();
}

void write_wav(const std::filesystem::path& path, const PcmSignal& signal,
               WavEncoding encoding) {
  write_file_atomic(path, encode_wav({signal.samples}, signal.sample_rate, encoding));
}

}  // namespace specnet
