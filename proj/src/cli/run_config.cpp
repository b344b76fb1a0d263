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

#include "specnet/cli/run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace specnet {

namespace {

using Type = ConfigValue::Type;

struct Field {
  std::string section;
  std::string key;
  std::function<std::optional<ConfigValue>(const RunConfig&)> get;
  std::function<void(RunConfig&, const ConfigValue&)> set;
};

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order = {"run",   "data",     "features", "model",
                                                 "train", "transfer", "ablation"};
  return order;
}

void expect(const ConfigValue& v, Type type) {
  if (v.type != type) throw ConfigError("expects a " + type_name(type) + ", got " + type_name(v.type));
}

std::int64_t as_int(const ConfigValue& v) {
  expect(v, Type::kInt);
  return v.i;
}

std::uint64_t as_uint(const ConfigValue& v) {
  const std::int64_t i = as_int(v);
  if (i < 0) throw ConfigError("expects a nonnegative integer");
  return std::uint64_t(i);
}

double as_double(const ConfigValue& v) {
  if (v.type == Type::kInt) return double(v.i);
  expect(v, Type::kFloat);
  return v.d;
}

bool as_bool(const ConfigValue& v) {
  expect(v, Type::kBool);
  return v.b;
}

const std::string& as_string(const ConfigValue& v) {
  expect(v, Type::kString);
  return v.s;
}

template <typename T, typename Convert>
std::vector<T> as_list(const ConfigValue& v, Convert convert) {
  expect(v, Type::kList);
  std::vector<T> out;
  for (const auto& item : v.list) out.push_back(convert(item));
  return out;
}

template <typename T, typename Convert>
ConfigValue list_of(const std::vector<T>& items, Convert convert) {
  std::vector<ConfigValue> out;
  for (const auto& item : items) out.push_back(convert(item));
  return ConfigValue::of(std::move(out));
}

// Field factories over a member accessor `ref(RunConfig&) -> T&`.
template <typename Ref>
Field size_field(std::string s, std::string k, Ref ref) {
  return {std::move(s), std::move(k),
          [ref](const RunConfig& c) {
            return std::optional(ConfigValue::of(std::int64_t(ref(const_cast<RunConfig&>(c)))));
          },
          [ref](RunConfig& c, const ConfigValue& v) { ref(c) = std::remove_reference_t<decltype(ref(c))>(as_uint(v)); }};
}

template <typename Ref>
Field double_field(std::string s, std::string k, Ref ref) {
  return {std::move(s), std::move(k),
          [ref](const RunConfig& c) {
            return std::optional(ConfigValue::of(double(ref(const_cast<RunConfig&>(c)))));
          },
          [ref](RunConfig& c, const ConfigValue& v) { ref(c) = as_double(v); }};
}

template <typename Ref>
Field bool_field(std::string s, std::string k, Ref ref) {
  return {std::move(s), std::move(k),
          [ref](const RunConfig& c) {
            return std::optional(ConfigValue::of(bool(ref(const_cast<RunConfig&>(c)))));
          },
          [ref](RunConfig& c, const ConfigValue& v) { ref(c) = as_bool(v); }};
}

template <typename Ref>
Field string_field(std::string s, std::string k, Ref ref) {
  return {std::move(s), std::move(k),
          [ref](const RunConfig& c) {
            return std::optional(ConfigValue::of(std::string(ref(const_cast<RunConfig&>(c)))));
          },
          [ref](RunConfig& c, const ConfigValue& v) { ref(c) = as_string(v); }};
}

// Enum stored as text through to_string/parse functions.
template <typename Ref, typename Format, typename Parse>
Field enum_field(std::string s, std::string k, Ref ref, Format format, Parse parse) {
  return {std::move(s), std::move(k),
          [ref, format](const RunConfig& c) {
            return std::optional(ConfigValue::of(format(ref(const_cast<RunConfig&>(c)))));
          },
          [ref, parse](RunConfig& c, const ConfigValue& v) {
            try {
              ref(c) = parse(as_string(v));
            } catch (const ConfigError&) {
              throw;
            } catch (const std::invalid_argument& e) {
              throw ConfigError(e.what());
            }
          }};
}

std::string normalization_text(NormalizationKind k) {
  return k == NormalizationKind::kVariance ? "variance" : "stddev";
}
NormalizationKind parse_normalization(const std::string& text) {
  if (text == "variance") return NormalizationKind::kVariance;
  if (text == "stddev") return NormalizationKind::kStdDev;
  throw ConfigError("unknown normalization '" + text + "' (variance | stddev)");
}

Task parse_task_value(const ConfigValue& v) {
  try {
    return parse_task(as_string(v));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Init parse_init_value(const ConfigValue& v) {
  try {
    return parse_init(as_string(v));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // [run]
    f.push_back(size_field("run", "seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
    f.push_back(string_field("run", "out", [](RunConfig& c) -> std::string& { return c.out; }));
    f.push_back(string_field("run", "name", [](RunConfig& c) -> std::string& { return c.name; }));
    f.push_back(size_field("run", "jobs", [](RunConfig& c) -> std::size_t& { return c.jobs; }));
    f.push_back(string_field("run", "profile", [](RunConfig& c) -> std::string& { return c.profile; }));
    // [data]
    f.push_back(enum_field("data", "dataset", [](RunConfig& c) -> Task& { return c.dataset; },
                           [](Task t) { return to_string(t); }, parse_task));
    f.push_back(string_field("data", "root", [](RunConfig& c) -> std::string& { return c.root; }));
    f.push_back(string_field("data", "manifest", [](RunConfig& c) -> std::string& { return c.manifest; }));
    f.push_back(string_field("data", "cache", [](RunConfig& c) -> std::string& { return c.cache; }));
    f.push_back(double_field("data", "clip_seconds", [](RunConfig& c) -> double& { return c.clip_seconds; }));
    // [features]
    f.push_back({"features", "sample_rate",
                 [](const RunConfig& c) { return std::optional(ConfigValue::of(std::int64_t(c.features.sample_rate))); },
                 [](RunConfig& c, const ConfigValue& v) { c.features.sample_rate = int(as_uint(v)); }});
    f.push_back(size_field("features", "frame_length", [](RunConfig& c) -> std::size_t& { return c.features.frame_length; }));
    f.push_back(size_field("features", "hop_length", [](RunConfig& c) -> std::size_t& { return c.features.hop_length; }));
    f.push_back(size_field("features", "n_mels", [](RunConfig& c) -> std::size_t& { return c.features.n_mels; }));
    f.push_back(double_field("features", "fmin", [](RunConfig& c) -> double& { return c.features.fmin; }));
    f.push_back(double_field("features", "fmax", [](RunConfig& c) -> double& { return c.features.fmax; }));
    f.push_back(double_field("features", "epsilon", [](RunConfig& c) -> double& { return c.features.epsilon; }));
    f.push_back(bool_field("features", "log_compress", [](RunConfig& c) -> bool& { return c.features.log_compress; }));
    f.push_back(enum_field("features", "normalization",
                           [](RunConfig& c) -> NormalizationKind& { return c.features.normalization; },
                           normalization_text, parse_normalization));
    // [model]
    f.push_back(enum_field("model", "family", [](RunConfig& c) -> Family& { return c.model.family; },
                           [](Family x) { return to_string(x); }, parse_family));
    f.push_back(string_field("model", "preset", [](RunConfig& c) -> std::string& { return c.model.preset; }));
    f.push_back(bool_field("model", "multiscale", [](RunConfig& c) -> bool& { return c.model.use_multiscale; }));
    f.push_back(size_field("model", "per_branch_channels",
                           [](RunConfig& c) -> std::size_t& { return c.model.per_branch_channels; }));
    f.push_back({"model", "global_pool",
                 [](const RunConfig& c) {
                   return std::optional(ConfigValue::of(
                       c.model.global_pool ? to_string(*c.model.global_pool) : std::string("default")));
                 },
                 [](RunConfig& c, const ConfigValue& v) {
                   const std::string& text = as_string(v);
                   if (text == "default") {
                     c.model.global_pool.reset();
                   } else if (text == "max" || text == "avg") {
                     c.model.global_pool = parse_pool_kind(text);
                   } else {
                     throw ConfigError("unknown pool '" + text + "' (default | max | avg)");
                   }
                 }});
    // [train]
    f.push_back(size_field("train", "batch_size", [](RunConfig& c) -> std::size_t& { return c.train.batch_size; }));
    f.push_back(double_field("train", "learning_rate", [](RunConfig& c) -> double& { return c.train.learning_rate; }));
    f.push_back(double_field("train", "momentum", [](RunConfig& c) -> double& { return c.train.momentum; }));
    f.push_back(double_field("train", "weight_decay", [](RunConfig& c) -> double& { return c.train.weight_decay; }));
    f.push_back(size_field("train", "patience", [](RunConfig& c) -> std::size_t& { return c.train.patience; }));
    f.push_back(size_field("train", "max_epochs", [](RunConfig& c) -> std::size_t& { return c.train.max_epochs; }));
    f.push_back({"train", "folds",
                 [](const RunConfig& c) {
                   return std::optional(list_of(c.folds, [](int x) { return ConfigValue::of(std::int64_t(x)); }));
                 },
                 [](RunConfig& c, const ConfigValue& v) {
                   c.folds = as_list<int>(v, [](const ConfigValue& x) { return int(as_int(x)); });
                 }});
    f.push_back({"train", "checkpoint_fold",
                 [](const RunConfig& c) { return std::optional(ConfigValue::of(std::int64_t(c.checkpoint_fold))); },
                 [](RunConfig& c, const ConfigValue& v) { c.checkpoint_fold = int(as_int(v)); }});
    f.push_back(bool_field("train", "save_checkpoint", [](RunConfig& c) -> bool& { return c.save_checkpoint; }));
    // [transfer]
    f.push_back(size_field("transfer", "epochs", [](RunConfig& c) -> std::size_t& { return c.transfer.epochs; }));
    f.push_back(double_field("transfer", "head_lr", [](RunConfig& c) -> double& { return c.transfer.head_lr; }));
    f.push_back(double_field("transfer", "head_wd", [](RunConfig& c) -> double& { return c.transfer.head_wd; }));
    f.push_back(double_field("transfer", "body_lr", [](RunConfig& c) -> double& { return c.transfer.body_lr; }));
    f.push_back(double_field("transfer", "body_wd", [](RunConfig& c) -> double& { return c.transfer.body_wd; }));
    f.push_back(double_field("transfer", "momentum", [](RunConfig& c) -> double& { return c.transfer.momentum; }));
    f.push_back(size_field("transfer", "batch_size", [](RunConfig& c) -> std::size_t& { return c.transfer.batch_size; }));
    f.push_back(bool_field("transfer", "reset_batchnorm",
                           [](RunConfig& c) -> bool& { return c.transfer.reset_batchnorm; }));
    f.push_back({"transfer", "tasks",
                 [](const RunConfig& c) {
                   return std::optional(list_of(c.tasks, [](Task t) { return ConfigValue::of(to_string(t)); }));
                 },
                 [](RunConfig& c, const ConfigValue& v) { c.tasks = as_list<Task>(v, parse_task_value); }});
    f.push_back({"transfer", "inits",
                 [](const RunConfig& c) {
                   return std::optional(list_of(c.inits, [](Init i) { return ConfigValue::of(to_string(i)); }));
                 },
                 [](RunConfig& c, const ConfigValue& v) { c.inits = as_list<Init>(v, parse_init_value); }});
    f.push_back({"transfer", "multiscale",
                 [](const RunConfig& c) {
                   return std::optional(list_of(c.multiscale_sweep, [](bool b) { return ConfigValue::of(b); }));
                 },
                 [](RunConfig& c, const ConfigValue& v) { c.multiscale_sweep = as_list<bool>(v, as_bool); }});
    f.push_back(string_field("transfer", "source_checkpoint",
                             [](RunConfig& c) -> std::string& { return c.source_checkpoint; }));
    f.push_back(string_field("transfer", "source_checkpoint_multiscale",
                             [](RunConfig& c) -> std::string& { return c.source_checkpoint_multiscale; }));
    // [ablation]
    f.push_back({"ablation", "fractions",
                 [](const RunConfig& c) {
                   return std::optional(list_of(c.fractions, [](double x) { return ConfigValue::of(x); }));
                 },
                 [](RunConfig& c, const ConfigValue& v) { c.fractions = as_list<double>(v, as_double); }});
    f.push_back(size_field("ablation", "iterations", [](RunConfig& c) -> std::size_t& { return c.iterations; }));
    f.push_back({"ablation", "seed_base",
                 [](const RunConfig& c) -> std::optional<ConfigValue> {
                   if (!c.seed_base) return std::nullopt;
                   return ConfigValue::of(std::int64_t(*c.seed_base));
                 },
                 [](RunConfig& c, const ConfigValue& v) { c.seed_base = as_uint(v); }});
    f.push_back(enum_field("ablation", "init", [](RunConfig& c) -> Init& { return c.ablation_init; },
                           [](Init i) { return to_string(i); }, parse_init));
    return f;
  }();
  return table;
}

void check_section(const std::string& section) {
  for (const auto& s : section_order()) {
    if (s == section) return;
  }
  throw ConfigError("unknown config section [" + section + "]");
}

const Field& find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return f;
  }
  check_section(section);
  throw ConfigError("unknown config key '" + key + "' in [" + section + "]");
}

void apply(RunConfig& config, const Field& field, const ConfigValue& value) {
  try {
    field.set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError("[" + field.section + "] " + field.key + ": " + e.what());
  }
}

std::size_t scale_down(std::size_t value, std::size_t factor) {
  return std::max<std::size_t>(1, (value + factor - 1) / factor);
}

}  // namespace

ConfigTable RunConfig::to_table() const {
  ConfigTable table;
  for (const auto& f : fields()) {
    if (auto v = f.get(*this)) table[f.section].emplace(f.key, std::move(*v));
  }
  return table;
}

std::string RunConfig::to_text() const { return format_config_text(to_table(), section_order()); }

RunConfig RunConfig::from_table(const ConfigTable& table) {
  RunConfig config;
  for (const auto& [section, entries] : table) {
    check_section(section);
    for (const auto& [key, value] : entries) apply(config, find_field(section, key), value);
  }
  return config;
}

RunConfig RunConfig::from_text(const std::string& text) { return from_table(parse_config_text(text)); }

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override '" + assignment + "' is not section.key=value");
  }
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const Field& field = find_field(section, key);
  ConfigValue value;
  try {
    value = ConfigValue::parse(assignment.substr(eq + 1));
  } catch (const ConfigError&) {
    // Bare words on the command line are taken as strings.
    value = ConfigValue::of(assignment.substr(eq + 1));
  }
  apply(*this, field, value);
}

void RunConfig::validate() const {
  auto fail = [](const std::string& message) { throw ConfigError("config: " + message); };
  if (jobs == 0) fail("[run] jobs must be >= 1");
  if (profile != "full" && profile != "desk") fail("[run] profile must be full or desk");
  if (clip_seconds < 0.0) fail("[data] clip_seconds must be >= 0");
  try {
    features.validate();
    ModelSpec probe = model;
    probe.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (train.batch_size == 0 || transfer.batch_size == 0) fail("batch_size must be >= 1");
  if (train.patience == 0) fail("[train] patience must be >= 1");
  if (train.max_epochs == 0) fail("[train] max_epochs must be >= 1");
  if (train.learning_rate < 0.0 || train.weight_decay < 0.0 || train.momentum < 0.0) {
    fail("[train] learning_rate, weight_decay and momentum must be >= 0");
  }
  for (int fold : folds) {
    if (fold < 1 || fold > 10) fail("[train] folds must lie in 1-10");
  }
  if (checkpoint_fold < 1 || checkpoint_fold > 10) fail("[train] checkpoint_fold must lie in 1-10");
  if (transfer.epochs == 0) fail("[transfer] epochs must be >= 1");
  if (transfer.head_lr < 0.0 || transfer.body_lr < 0.0 || transfer.head_wd < 0.0 ||
      transfer.body_wd < 0.0 || transfer.momentum < 0.0) {
    fail("[transfer] learning rates, weight decays and momentum must be >= 0");
  }
  if (tasks.empty() || inits.empty() || multiscale_sweep.empty()) {
    fail("[transfer] tasks, inits and multiscale must be nonempty");
  }
  for (Task t : tasks) {
    if (!is_speech_task(t)) fail("[transfer] tasks must be speech tasks");
  }
  if (fractions.empty()) fail("[ablation] fractions must be nonempty");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) fail("[ablation] fraction " + format_double(f) + " outside (0, 1]");
  }
  if (iterations == 0) fail("[ablation] iterations must be >= 1");
}

RunConfig RunConfig::resolved() const {
  validate();
  RunConfig r = *this;
  if (!r.seed_base) r.seed_base = r.seed;
  if (r.clip_seconds == 0.0) r.clip_seconds = default_clip_seconds(r.dataset);
  if (r.features.fmax == 0.0) r.features.fmax = r.features.resolved_fmax();
  if (r.profile == "desk") {
    if (r.model.family != Family::kSbCnn) r.model.preset = "tiny";
    r.train.max_epochs = scale_down(r.train.max_epochs, 20);
    r.train.patience = scale_down(r.train.patience, 5);
    r.transfer.epochs = scale_down(r.transfer.epochs, 20);
    r.profile = "full";
  }
  r.validate();
  return r;
}

}  // namespace specnet
