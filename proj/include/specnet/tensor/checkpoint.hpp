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

#ifndef SPECNET_TENSOR_CHECKPOINT_HPP_
#define SPECNET_TENSOR_CHECKPOINT_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "specnet/tensor/tensor.hpp"

namespace specnet {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Binary layout, little-endian throughout:
//   "SPNW" | u32 version | u32 entry count
//   per entry: u16 name length | name bytes | u8 rank | u32 dims[rank] |
//              f32 values (row-major)
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<char> encode_checkpoint(const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> decode_checkpoint(const std::vector<char>& bytes);

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

// Copies checkpoint values into `targets` in place. Every target name must be
// present with an identical shape and no extra entries may remain.
void restore_into(const std::vector<NamedTensor>& checkpoint,
                  std::vector<NamedTensor>& targets);

}  // namespace specnet

#endif  // SPECNET_TENSOR_CHECKPOINT_HPP_
