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

#ifndef SPECNET_UTIL_IO_HPP_
#define SPECNET_UTIL_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specnet {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<char> read_file_bytes(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const char> bytes);
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view text);
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  write_file_atomic(path, std::string_view(text));
}

// Little-endian encoder for the binary formats.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(char(v)); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  const std::vector<char>& bytes() const { return bytes_; }
  std::vector<char> take() { return std::move(bytes_); }

 private:
  template <typename U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes_.push_back(char((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> bytes_;
};

// Little-endian decoder. Reading past the end throws `Truncated`.
class ByteReader {
 public:
  struct Truncated : std::runtime_error {
    Truncated() : std::runtime_error("unexpected end of data") {}
  };

  explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return std::uint8_t(take(1)[0]); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string_view raw(std::size_t n) {
    auto s = take(n);
    return {s.data(), s.size()};
  }
  void skip(std::size_t n) { take(n); }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const char> take(std::size_t n) {
    if (remaining() < n) throw Truncated();
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename U>
  U get() {
    auto s = take(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(std::uint8_t(s[i])) << (8 * i);
    return v;
  }

  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace specnet

#endif  // SPECNET_UTIL_IO_HPP_
