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

#include "specnet/tensor/checkpoint.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "specnet/util/io.hpp"

namespace specnet {

namespace {
constexpr std::string_view kMagic = "SPNW";
}  // namespace

std::vector<char> encode_checkpoint(const std::vector<NamedTensor>& entries) {
  ByteWriter out;
  out.raw(kMagic);
  out.u32(kCheckpointVersion);
  out.u32(std::uint32_t(entries.size()));
  for (const auto& entry : entries) {
    if (entry.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw CheckpointError("checkpoint: name too long: " + entry.name);
    }
    const Shape& shape = entry.tensor.shape();
    if (shape.size() > std::numeric_limits<std::uint8_t>::max()) {
      throw CheckpointError("checkpoint: rank too large for " + entry.name);
    }
    out.u16(std::uint16_t(entry.name.size()));
    out.raw(entry.name);
    out.u8(std::uint8_t(shape.size()));
    for (std::size_t d : shape) out.u32(std::uint32_t(d));
    for (float v : entry.tensor.values()) out.f32(v);
  }
  return out.take();
}

std::vector<NamedTensor> decode_checkpoint(const std::vector<char>& bytes) {
  ByteReader in(bytes);
  try {
    if (in.raw(4) != kMagic) throw CheckpointError("checkpoint: bad magic");
    const std::uint32_t version = in.u32();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint: unsupported version " +
                            std::to_string(version));
    }
    const std::uint32_t count = in.u32();
    std::vector<NamedTensor> entries;
    entries.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
      NamedTensor entry;
      entry.name = std::string(in.raw(in.u16()));
      Shape shape(in.u8());
      for (auto& d : shape) d = in.u32();
      const std::size_t numel = shape_numel(shape);
      if (numel > in.remaining() / 4) throw ByteReader::Truncated();
      std::vector<float> values(numel);
      for (auto& v : values) v = in.f32();
      entry.tensor = Tensor(std::move(shape), std::move(values));
      entries.push_back(std::move(entry));
    }
    if (in.remaining() != 0) {
      throw CheckpointError("checkpoint: " + std::to_string(in.remaining()) +
                            " trailing bytes");
    }
    return entries;
  } catch (const ByteReader::Truncated&) {
    throw CheckpointError("checkpoint: truncated payload");
  }
}

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<NamedTensor>& entries) {
  write_file_atomic(path, encode_checkpoint(entries));
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(read_file_bytes(path));
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
}

void restore_into(const std::vector<NamedTensor>& checkpoint,
                  std::vector<NamedTensor>& targets) {
  std::map<std::string_view, const Tensor*> by_name;
  for (const auto& entry : checkpoint) {
    if (!by_name.emplace(entry.name, &entry.tensor).second) {
      throw CheckpointError("checkpoint: duplicate entry " + entry.name);
    }
  }
  for (const auto& target : targets) {
    auto it = by_name.find(target.name);
    if (it == by_name.end()) {
      throw CheckpointError("checkpoint: missing entry " + target.name);
    }
    if (it->second->shape() != target.tensor.shape()) {
      throw CheckpointError("checkpoint: " + target.name + " has shape " +
                            shape_to_string(it->second->shape()) +
                            ", model expects " +
                            shape_to_string(target.tensor.shape()));
    }
  }
  if (by_name.size() != targets.size()) {
    throw CheckpointError("checkpoint: holds " + std::to_string(by_name.size()) +
                          " entries, model has " +
                          std::to_string(targets.size()));
  }
  for (auto& target : targets) {
    auto src = by_name.at(target.name)->values();
    std::copy(src.begin(), src.end(), target.tensor.mutable_values().begin());
  }
}

}  // namespace specnet
