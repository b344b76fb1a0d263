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

#include "specnet/models/model.hpp"

#include <stdexcept>

#include "json.hpp"
#include "specnet/util/io.hpp"

namespace specnet {

std::string to_string(Family family) {
  switch (family) {
    case Family::kSbCnn: return "sbcnn";
    case Family::kResNet: return "resnet";
    case Family::kDenseNet: return "densenet";
  }
  return "?";
}

Family parse_family(const std::string& text) {
  if (text == "sbcnn") return Family::kSbCnn;
  if (text == "resnet") return Family::kResNet;
  if (text == "densenet") return Family::kDenseNet;
  throw std::invalid_argument("unknown model family '" + text + "'");
}

std::string to_string(PoolKind kind) { return kind == PoolKind::kMax ? "max" : "avg"; }

PoolKind parse_pool_kind(const std::string& text) {
  if (text == "max") return PoolKind::kMax;
  if (text == "avg") return PoolKind::kAvg;
  throw std::invalid_argument("unknown pool kind '" + text + "'");
}

namespace {

enum class StemKind { kImageNet, kCompact };

struct ResNetPreset {
  bool bottleneck;
  std::vector<std::size_t> blocks;
  std::size_t base_channels;
  StemKind stem;
};

struct DenseNetPreset {
  std::size_t growth;
  std::vector<std::size_t> blocks;
  std::size_t init_features;
  StemKind stem;
  std::size_t bn_size = 4;
  double compression = 0.5;
};

ResNetPreset resnet_preset(const std::string& name) {
  if (name == "18") return {false, {2, 2, 2, 2}, 64, StemKind::kImageNet};
  if (name == "34") return {false, {3, 4, 6, 3}, 64, StemKind::kImageNet};
  if (name == "50") return {true, {3, 4, 6, 3}, 64, StemKind::kImageNet};
  if (name == "tiny") return {false, {2, 2}, 16, StemKind::kCompact};
  throw std::invalid_argument("unknown resnet preset '" + name + "'");
}

DenseNetPreset densenet_preset(const std::string& name) {
  if (name == "121") return {32, {6, 12, 24, 16}, 64, StemKind::kImageNet};
  if (name == "161") return {48, {6, 12, 36, 24}, 96, StemKind::kImageNet};
  if (name == "169") return {32, {6, 12, 32, 32}, 64, StemKind::kImageNet};
  if (name == "tiny") return {8, {2, 2}, 16, StemKind::kCompact};
  if (name == "desk") return {12, {3, 6, 12, 8}, 24, StemKind::kCompact};
  throw std::invalid_argument("unknown densenet preset '" + name + "'");
}

// conv7x7/2 + BN + ReLU + maxpool3x3/2 for the ImageNet designs, or a
// conv3x3/1 + BN + ReLU + maxpool2x2/2 variant for the small presets.
struct Stem {
  Conv2d conv;
  BatchNorm2d norm;
  PoolGeometry pool;

  static Stem make(StemKind kind, std::size_t in_channels, std::size_t out_channels, Rng& rng) {
    if (kind == StemKind::kImageNet) {
      return {Conv2d::make(in_channels, out_channels, ConvGeometry::square(7, 2, 3), false, rng),
              BatchNorm2d::make(out_channels), PoolGeometry::square(3, 2, 1)};
    }
    return {Conv2d::make(in_channels, out_channels, ConvGeometry::square(3, 1, 1), false, rng),
            BatchNorm2d::make(out_channels), PoolGeometry::square(2, 2, 0)};
  }
  Tensor forward(const Tensor& x, Mode mode) {
    return max_pool2d(relu(norm.forward(conv.forward(x), mode)), pool);
  }
  void visit(const std::string& prefix, const ParamVisitor& fn) {
    conv.visit(prefix + ".conv", fn);
    norm.visit(prefix + ".norm", fn);
  }
};

}  // namespace

class Model::Body {
 public:
  virtual ~Body() = default;
  virtual Tensor forward(const Tensor& x, Mode mode) = 0;
  virtual void visit(const std::string& prefix, const ParamVisitor& fn) = 0;
  virtual std::size_t feature_dim() const = 0;
};

namespace {

// Three 5x5 convolutions with max-pooling between the first two pairs, then a
// global pool in place of the final fixed-size pooling/flatten, and a 64-unit
// hidden affine layer.
class SbCnnBody : public Model::Body {
 public:
  static constexpr std::size_t kHidden = 64;

  SbCnnBody(std::size_t in_channels, PoolKind pool, Rng& rng)
      : pool_kind_(pool),
        conv1_(Conv2d::make(in_channels, 24, ConvGeometry::same(5), true, rng)),
        conv2_(Conv2d::make(24, 48, ConvGeometry::same(5), true, rng)),
        conv3_(Conv2d::make(48, 48, ConvGeometry::same(5), true, rng)),
        fc_(Linear::make(48, kHidden, rng)) {}

  Tensor forward(const Tensor& x, Mode) override {
    const PoolGeometry pool{4, 2, 4, 2, 0, 0};
    Tensor h = max_pool2d(relu(conv1_.forward(x)), pool);
    h = max_pool2d(relu(conv2_.forward(h)), pool);
    h = relu(conv3_.forward(h));
    h = flatten(global_pool(h, pool_kind_));
    return relu(fc_.forward(h));
  }
  void visit(const std::string& prefix, const ParamVisitor& fn) override {
    conv1_.visit(prefix + ".conv1", fn);
    conv2_.visit(prefix + ".conv2", fn);
    conv3_.visit(prefix + ".conv3", fn);
    fc_.visit(prefix + ".fc1", fn);
  }
  std::size_t feature_dim() const override { return kHidden; }

 private:
  PoolKind pool_kind_;
  Conv2d conv1_, conv2_, conv3_;
  Linear fc_;
};

class ResNetBody : public Model::Body {
 public:
  ResNetBody(const ResNetPreset& preset, std::size_t in_channels, PoolKind pool, Rng& rng)
      : pool_kind_(pool),
        stem_(Stem::make(preset.stem, in_channels, preset.base_channels, rng)) {
    std::size_t channels = preset.base_channels;
    for (std::size_t s = 0; s < preset.blocks.size(); ++s) {
      const std::size_t width = preset.base_channels << s;
      std::vector<ResidualBlock> stage;
      for (std::size_t b = 0; b < preset.blocks[s]; ++b) {
        const std::size_t stride = (s > 0 && b == 0) ? 2 : 1;
        stage.push_back(preset.bottleneck
                            ? ResidualBlock::make_bottleneck(channels, width, stride, rng)
                            : ResidualBlock::make_basic(channels, width, stride, rng));
        channels = stage.back().out_channels();
      }
      stages_.push_back(std::move(stage));
    }
    final_norm_ = BatchNorm2d::make(channels);
    features_ = channels;
  }

  Tensor forward(const Tensor& x, Mode mode) override {
    Tensor h = stem_.forward(x, mode);
    for (auto& stage : stages_) {
      for (auto& block : stage) h = block.forward(h, mode);
    }
    h = relu(final_norm_.forward(h, mode));
    return flatten(global_pool(h, pool_kind_));
  }
  void visit(const std::string& prefix, const ParamVisitor& fn) override {
    stem_.visit(prefix + ".stem", fn);
    for (std::size_t s = 0; s < stages_.size(); ++s) {
      for (std::size_t b = 0; b < stages_[s].size(); ++b) {
        stages_[s][b].visit(prefix + ".stage" + std::to_string(s + 1) + ".block" +
                                std::to_string(b + 1),
                            fn);
      }
    }
    final_norm_.visit(prefix + ".final_norm", fn);
  }
  std::size_t feature_dim() const override { return features_; }

 private:
  PoolKind pool_kind_;
  Stem stem_;
  std::vector<std::vector<ResidualBlock>> stages_;
  BatchNorm2d final_norm_;
  std::size_t features_ = 0;
};

class DenseNetBody : public Model::Body {
 public:
  DenseNetBody(const DenseNetPreset& preset, std::size_t in_channels, PoolKind pool, Rng& rng)
      : pool_kind_(pool),
        stem_(Stem::make(preset.stem, in_channels, preset.init_features, rng)) {
    std::size_t channels = preset.init_features;
    for (std::size_t b = 0; b < preset.blocks.size(); ++b) {
      blocks_.push_back(DenseBlock::make(channels, preset.blocks[b], preset.growth, preset.bn_size, rng));
      channels = blocks_.back().out_channels();
      if (b + 1 < preset.blocks.size()) {
        const auto reduced = std::size_t(double(channels) * preset.compression);
        transitions_.push_back(Transition::make(channels, reduced, rng));
        channels = reduced;
      }
    }
    final_norm_ = BatchNorm2d::make(channels);
    features_ = channels;
  }

  Tensor forward(const Tensor& x, Mode mode) override {
    Tensor h = stem_.forward(x, mode);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      h = blocks_[b].forward(h, mode);
      if (b < transitions_.size()) h = transitions_[b].forward(h, mode);
    }
    h = relu(final_norm_.forward(h, mode));
    return flatten(global_pool(h, pool_kind_));
  }
  void visit(const std::string& prefix, const ParamVisitor& fn) override {
    stem_.visit(prefix + ".stem", fn);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      blocks_[b].visit(prefix + ".block" + std::to_string(b + 1), fn);
      if (b < transitions_.size()) {
        transitions_[b].visit(prefix + ".transition" + std::to_string(b + 1), fn);
      }
    }
    final_norm_.visit(prefix + ".final_norm", fn);
  }
  std::size_t feature_dim() const override { return features_; }

 private:
  PoolKind pool_kind_;
  Stem stem_;
  std::vector<DenseBlock> blocks_;
  std::vector<Transition> transitions_;
  BatchNorm2d final_norm_;
  std::size_t features_ = 0;
};

std::unique_ptr<Model::Body> make_body(const ModelSpec& spec, Rng& rng) {
  const std::size_t in = spec.stem_input_channels();
  const PoolKind pool = spec.resolved_global_pool();
  switch (spec.family) {
    case Family::kSbCnn:
      if (spec.preset != "default" && !spec.preset.empty()) {
        throw std::invalid_argument("unknown sbcnn preset '" + spec.preset + "'");
      }
      return std::make_unique<SbCnnBody>(in, pool, rng);
    case Family::kResNet:
      return std::make_unique<ResNetBody>(resnet_preset(spec.preset), in, pool, rng);
    case Family::kDenseNet:
      return std::make_unique<DenseNetBody>(densenet_preset(spec.preset), in, pool, rng);
  }
  throw std::invalid_argument("unknown model family");
}

}  // namespace

std::size_t ModelSpec::stem_input_channels() const {
  return use_multiscale ? std::size(MultiscaleAdapter::kDilations) * per_branch_channels : 1;
}

PoolKind ModelSpec::resolved_global_pool() const {
  if (global_pool) return *global_pool;
  return family == Family::kSbCnn ? PoolKind::kMax : PoolKind::kAvg;
}

void ModelSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("model spec: num_classes must be >= 2");
  if (use_multiscale && per_branch_channels == 0) {
    throw std::invalid_argument("model spec: per_branch_channels must be >= 1");
  }
  if (input_channels != 0 && input_channels != stem_input_channels()) {
    throw std::invalid_argument("model spec: stem expects " + std::to_string(input_channels) +
                                " input channels but the " +
                                (use_multiscale ? "adapter produces " : "spectrogram has ") +
                                std::to_string(stem_input_channels()));
  }
  switch (family) {
    case Family::kResNet: resnet_preset(preset); break;
    case Family::kDenseNet: densenet_preset(preset); break;
    case Family::kSbCnn:
      if (preset != "default" && !preset.empty()) {
        throw std::invalid_argument("unknown sbcnn preset '" + preset + "'");
      }
      break;
  }
}

std::string ModelSpec::to_json() const {
  nlohmann::json j;
  j["family"] = to_string(family);
  j["preset"] = preset;
  j["use_multiscale"] = use_multiscale;
  j["per_branch_channels"] = per_branch_channels;
  j["num_classes"] = num_classes;
  j["input_channels"] = stem_input_channels();
  j["global_pool"] = to_string(resolved_global_pool());
  return j.dump(2);
}

ModelSpec ModelSpec::from_json(const std::string& text) {
  ModelSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.family = parse_family(j.at("family").get<std::string>());
    spec.preset = j.at("preset").get<std::string>();
    spec.use_multiscale = j.at("use_multiscale").get<bool>();
    spec.per_branch_channels = j.at("per_branch_channels").get<std::size_t>();
    spec.num_classes = j.at("num_classes").get<std::size_t>();
    spec.input_channels = j.value("input_channels", std::size_t(0));
    if (j.contains("global_pool")) spec.global_pool = parse_pool_kind(j["global_pool"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

Model::Model(const ModelSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  Rng rng(seed);
  if (spec_.use_multiscale) adapter_ = MultiscaleAdapter::make(spec_.per_branch_channels, rng);
  body_ = make_body(spec_, rng);
  head_ = Linear::make(body_->feature_dim(), spec_.num_classes, rng);
}

Model::~Model() = default;
Model::Model(Model&&) noexcept = default;
Model& Model::operator=(Model&&) noexcept = default;

Tensor Model::features(const Tensor& batch, Mode mode) {
  if (batch.rank() != 4 || batch.dim(1) != 1) {
    throw ShapeError("model: expects a [N,1,H,W] spectrogram batch, got " +
                     shape_to_string(batch.shape()));
  }
  Tensor h = adapter_ ? adapter_->forward(batch) : batch;
  return body_->forward(h, mode);
}

Tensor Model::forward(const Tensor& batch, Mode mode) {
  return head_.forward(features(batch, mode));
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> out;
  auto collect = [&out](ParamGroupTag group) {
    return [&out, group](const std::string& name, Tensor& t, bool trainable) {
      out.push_back({name, t, trainable, group});
    };
  };
  if (adapter_) adapter_->visit("adapter", collect(ParamGroupTag::kBody));
  body_->visit("body", collect(ParamGroupTag::kBody));
  head_.visit("head", collect(ParamGroupTag::kHead));
  return out;
}

std::vector<NamedTensor> Model::state() {
  std::vector<NamedTensor> out;
  for (auto& p : parameters()) out.push_back({p.name, p.tensor});
  return out;
}

std::size_t Model::trainable_parameter_count() {
  std::size_t n = 0;
  for (auto& p : parameters()) {
    if (p.trainable) n += p.tensor.numel();
  }
  return n;
}

std::size_t Model::feature_dim() const { return body_->feature_dim(); }

void Model::replace_head(std::size_t num_classes, std::uint64_t seed) {
  if (num_classes < 2) throw std::invalid_argument("replace_head: num_classes must be >= 2");
  Rng rng(seed);
  head_ = Linear::make(body_->feature_dim(), num_classes, rng);
  spec_.num_classes = num_classes;
}

void Model::reset_batchnorm_statistics() {
  for (auto& p : parameters()) {
    if (p.trainable) continue;
    const bool is_var = p.name.ends_with(".running_var");
    for (auto& v : p.tensor.mutable_values()) v = is_var ? 1.0f : 0.0f;
  }
}

Model Model::clone() {
  Model copy(spec_, 0);
  auto src = parameters();
  auto dst = copy.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto from = src[i].tensor.values();
    std::copy(from.begin(), from.end(), dst[i].tensor.mutable_values().begin());
  }
  return copy;
}

Model build_model(const ModelSpec& spec, std::uint64_t seed) { return Model(spec, seed); }

Model replace_head(Model model, std::size_t num_classes, std::uint64_t seed) {
  model.replace_head(num_classes, seed);
  return model;
}

std::uint64_t parameter_checksum(Model& model, std::optional<ParamGroupTag> group,
                                 bool trainable_only) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  for (auto& p : model.parameters()) {
    if (group && p.group != *group) continue;
    if (trainable_only && !p.trainable) continue;
    mix(p.name.data(), p.name.size());
    mix(p.tensor.values().data(), p.tensor.numel() * sizeof(float));
  }
  return hash;
}

std::filesystem::path spec_sidecar_path(const std::filesystem::path& checkpoint) {
  std::filesystem::path sidecar = checkpoint;
  sidecar += ".json";
  return sidecar;
}

void save_model(Model& model, const std::filesystem::path& path) {
  write_checkpoint(path, model.state());
  write_file_atomic(spec_sidecar_path(path), model.spec().to_json());
}

void load_parameters(Model& model, const std::filesystem::path& path) {
  auto targets = model.state();
  restore_into(read_checkpoint(path), targets);
}

Model load_model(const std::filesystem::path& path) {
  std::vector<char> text;
  try {
    text = read_file_bytes(spec_sidecar_path(path));
  } catch (const IoError& e) {
    throw CheckpointError(std::string("model sidecar: ") + e.what());
  }
  Model model(ModelSpec::from_json(std::string(text.begin(), text.end())), 0);
  load_parameters(model, path);
  return model;
}

}  // namespace specnet
