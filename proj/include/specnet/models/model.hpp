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

#ifndef SPECNET_MODELS_MODEL_HPP_
#define SPECNET_MODELS_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specnet/models/blocks.hpp"
#include "specnet/models/layers.hpp"
#include "specnet/tensor/checkpoint.hpp"

namespace specnet {

enum class Family { kSbCnn, kResNet, kDenseNet };

std::string to_string(Family family);
Family parse_family(const std::string& text);
std::string to_string(PoolKind kind);
PoolKind parse_pool_kind(const std::string& text);

// Declarative architecture description. Presets:
//   sbcnn:    "default"
//   resnet:   "18", "34", "50", "tiny" (2 stages x 2 blocks, 16 base channels)
//   densenet: "121", "161", "169", "tiny" (growth 8, blocks [2, 2]),
//             "desk" (growth 12, blocks [3, 6, 12, 8])
struct ModelSpec {
  Family family = Family::kDenseNet;
  std::string preset = "121";
  bool use_multiscale = false;
  std::size_t per_branch_channels = 8;
  std::size_t num_classes = 10;
  // Channels seen by the stem; 0 derives it (1, or 4 * per_branch_channels
  // with the adapter). A non-zero value must agree with the derived one.
  std::size_t input_channels = 0;
  // Unset selects the family default: average for resnet/densenet, max for
  // sbcnn.
  std::optional<PoolKind> global_pool;

  std::size_t stem_input_channels() const;
  PoolKind resolved_global_pool() const;
  void validate() const;

  std::string to_json() const;
  static ModelSpec from_json(const std::string& text);
  bool operator==(const ModelSpec&) const = default;
};

enum class ParamGroupTag { kBody, kHead };

struct ParamRef {
  std::string name;
  Tensor tensor;
  bool trainable;
  ParamGroupTag group;
};

// Spectrogram classifier: optional multiscale adapter, a family-specific body
// ending in a global pool sized to whatever map reaches it, and one affine
// head. Input batches are [N, 1, time, mel].
class Model {
 public:
  class Body;

  Model(const ModelSpec& spec, std::uint64_t seed);
  ~Model();
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;

  const ModelSpec& spec() const { return spec_; }
  Tensor forward(const Tensor& batch, Mode mode);
  // Penultimate activations [N, F] fed to the head.
  Tensor features(const Tensor& batch, Mode mode);

  // Every owned tensor in a fixed order, buffers included.
  std::vector<ParamRef> parameters();
  std::vector<NamedTensor> state();
  std::size_t trainable_parameter_count();

  Linear& head() { return head_; }
  std::size_t feature_dim() const;
  bool has_adapter() const { return adapter_.has_value(); }
  MultiscaleAdapter& adapter() { return *adapter_; }
  Body& body() { return *body_; }

  // Swaps in a freshly initialized head for `num_classes`; every other tensor
  // is left untouched.
  void replace_head(std::size_t num_classes, std::uint64_t seed);
  void reset_batchnorm_statistics();
  Model clone();

 private:
  ModelSpec spec_;
  std::optional<MultiscaleAdapter> adapter_;
  std::unique_ptr<Body> body_;
  Linear head_;
};

Model build_model(const ModelSpec& spec, std::uint64_t seed);
Model replace_head(Model model, std::size_t num_classes, std::uint64_t seed);

// FNV-1a over the raw bytes of the selected tensors, in parameter order.
std::uint64_t parameter_checksum(Model& model, std::optional<ParamGroupTag> group,
                                 bool trainable_only);

// Writes the tensor checkpoint at `path` and its ModelSpec to `path` + ".json".
void save_model(Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);
// Restores tensors into an existing model, rejecting any name or shape
// mismatch.
void load_parameters(Model& model, const std::filesystem::path& path);
std::filesystem::path spec_sidecar_path(const std::filesystem::path& checkpoint);

}  // namespace specnet

#endif  // SPECNET_MODELS_MODEL_HPP_
