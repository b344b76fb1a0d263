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

#include "specnet/cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "specnet/audio/wav.hpp"
#include "specnet/train/experiments.hpp"
#include "specnet/util/io.hpp"

namespace specnet {

namespace fs = std::filesystem;

Json config_to_json(const RunConfig& config) {
  std::function<Json(const ConfigValue&)> convert = [&](const ConfigValue& v) -> Json {
    switch (v.type) {
      case ConfigValue::Type::kBool: return v.b;
      case ConfigValue::Type::kInt: return v.i;
      case ConfigValue::Type::kFloat: return v.d;
      case ConfigValue::Type::kString: return v.s;
      case ConfigValue::Type::kList: {
        Json list = Json::array();
        for (const auto& item : v.list) list.push_back(convert(item));
        return list;
      }
    }
    return nullptr;
  };
  Json out = Json::object();
  for (const auto& [section, entries] : config.to_table()) {
    for (const auto& [key, value] : entries) out[section][key] = convert(value);
  }
  return out;
}

namespace {

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// "a,b,c" -> ["a", "b", "c"] (quoted) or [a, b, c].
std::string list_text(const std::string& csv, bool quote) {
  std::string out = "[";
  std::stringstream in(csv);
  std::string item;
  bool first = true;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    if (!first) out += ", ";
    out += quote ? "\"" + item + "\"" : item;
    first = false;
  }
  return out + "]";
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;  // section.key -> value text
  std::string input;                         // report subcommand
};

// Registers a flag whose value is forwarded as a section.key override.
void forward(CLI::App* app, Options& opts, const std::string& flag, const std::string& target,
             const std::string& help, bool quote = false, bool list = false) {
  app->add_option_function<std::string>(
      flag,
      [&opts, target, quote, list](const std::string& value) {
        if (list) {
          opts.flags[target] = list_text(value, quote);
        } else {
          opts.flags[target] = quote ? ConfigValue::of(value).to_text() : value;
        }
      },
      help);
}

void add_common(CLI::App* app, Options& opts) {
  app->add_option("--config", opts.config_path, "Config file (sectioned key = value)");
  app->add_option("--set", opts.overrides, "Override, e.g. --set train.batch_size=32");
  forward(app, opts, "--seed", "run.seed", "Seed for every random choice");
  forward(app, opts, "--out", "run.out", "Output root", true);
  forward(app, opts, "--name", "run.name", "Run subdirectory name", true);
  forward(app, opts, "--jobs", "run.jobs", "Parallel independent runs");
  forward(app, opts, "--profile", "run.profile", "full | desk", true);
  forward(app, opts, "--dataset", "data.dataset", "us8k | sc_lr2 | sc_core20 | sc_all30", true);
  forward(app, opts, "--root", "data.root", "Dataset root directory", true);
  forward(app, opts, "--manifest", "data.manifest", "UrbanSound8K CSV", true);
  forward(app, opts, "--cache", "data.cache", "Feature cache directory", true);
  forward(app, opts, "--clip-seconds", "data.clip_seconds", "Clip length before features");
}

void add_model(CLI::App* app, Options& opts) {
  forward(app, opts, "--family", "model.family", "sbcnn | resnet | densenet", true);
  forward(app, opts, "--preset", "model.preset", "Depth preset", true);
  forward(app, opts, "--multiscale", "model.multiscale", "true | false");
}

RunConfig build_config(const Options& opts) {
  RunConfig config = opts.config_path.empty() ? RunConfig{} : RunConfig::from_file(opts.config_path);
  for (const auto& o : opts.overrides) config.set(o);
  for (const auto& [target, value] : opts.flags) config.set(target + "=" + value);
  return config.resolved();
}

fs::path prepare_run_dir(const RunConfig& config, const std::string& command) {
  const std::string name = config.name.empty()
                               ? command + "-" + utc_stamp() + "-seed" + std::to_string(config.seed)
                               : config.name;
  const fs::path dir = fs::path(config.out) / name;
  fs::create_directories(dir);
  write_file_atomic(dir / "config.toml", "# resolved " + command + " configuration\n" + config.to_text());
  return dir;
}

fs::path cache_dir(const RunConfig& config) {
  return config.cache.empty() ? fs::path(config.out) / "cache" : fs::path(config.cache);
}

PreparedData prepare(const RunConfig& config, Task task, std::ostream& out) {
  if (config.root.empty()) throw ConfigError("config: [data] root is required");
  PreparedData data;
  data.dataset = load_dataset(task, config.root, config.manifest);
  data.feature_config = config.features;
  const FeaturePipeline pipeline{config.features, config.clip_seconds};
  data.features = featurize(data.dataset, pipeline, cache_dir(config), config.jobs);
  out << "loaded " << data.dataset.examples.size() << " examples, "
      << data.dataset.num_classes() << " classes (" << to_string(task) << ")\n";
  return data;
}

void finish(Report report, const RunConfig& config, const fs::path& dir, std::ostream& out) {
  report.config = config_to_json(config);
  const EmittedReport paths = emit_report(report, dir);
  out << "wrote " << paths.json.string() << "\n" << "wrote " << paths.csv.string() << "\n";
}

int do_featurize(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_run_dir(config, "featurize");
  const PreparedData data = prepare(config, config.dataset, out);
  Json manifest;
  manifest["dataset"] = to_string(data.dataset.task);
  manifest["class_names"] = data.dataset.class_names;
  manifest["feature_fingerprint"] = config.features.fingerprint();
  manifest["clip_seconds"] = config.clip_seconds;
  Json entries = Json::array();
  for (const auto& e : data.dataset.examples) {
    Json row;
    row["id"] = e.id;
    row["audio"] = e.audio_path.string();
    row["cache"] = data.features.cache_paths.at(e.id).string();
    row["label"] = e.label;
    if (e.fold) row["fold"] = *e.fold;
    if (e.split) row["split"] = to_string(*e.split);
    entries.push_back(std::move(row));
  }
  manifest["entries"] = std::move(entries);
  write_file_atomic(dir / "features_manifest.json", manifest.dump(2) + "\n");
  out << "cached " << data.dataset.examples.size() << " feature files under "
      << cache_dir(config).string() << "\n"
      << "wrote " << (dir / "features_manifest.json").string() << "\n";
  return kExitOk;
}

int do_train(const RunConfig& config, std::ostream& out) {
  if (config.dataset != Task::kUs8k) throw ConfigError("config: train needs [data] dataset = \"us8k\"");
  const fs::path dir = prepare_run_dir(config, "train");
  const PreparedData data = prepare(config, config.dataset, out);
  CrossvalConfig cv;
  cv.model = config.model;
  cv.train = config.train;
  cv.seed = config.seed;
  cv.folds = config.folds;
  cv.checkpoint_fold = config.checkpoint_fold;
  cv.jobs = config.jobs;
  if (config.save_checkpoint) cv.checkpoint_path = dir / "model.spnw";
  finish(run_crossval(cv, data), config, dir, out);
  return kExitOk;
}

int do_transfer(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_run_dir(config, "transfer");
  std::map<Task, PreparedData> cache;
  TaskDataProvider provider = [&](Task task) -> const PreparedData& {
    auto it = cache.find(task);
    if (it == cache.end()) it = cache.emplace(task, prepare(config, task, out)).first;
    return it->second;
  };
  TransferConfig tc;
  tc.model = config.model;
  tc.transfer = config.transfer;
  tc.seed = config.seed;
  tc.tasks = config.tasks;
  tc.inits = config.inits;
  tc.multiscale = config.multiscale_sweep;
  tc.sources = {config.source_checkpoint, config.source_checkpoint_multiscale};
  tc.jobs = config.jobs;
  finish(run_transfer(tc, provider), config, dir, out);
  return kExitOk;
}

int do_ablate(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_run_dir(config, "ablate");
  const PreparedData data = prepare(config, config.dataset, out);
  AblationConfig ac;
  ac.model = config.model;
  ac.transfer = config.transfer;
  ac.seed = config.seed;
  ac.seed_base = config.seed_base.value_or(config.seed);
  ac.fractions = config.fractions;
  ac.iterations = config.iterations;
  ac.init = config.ablation_init;
  ac.source_checkpoint = config.model.use_multiscale ? config.source_checkpoint_multiscale
                                                     : config.source_checkpoint;
  ac.jobs = config.jobs;
  finish(run_ablation(ac, data), config, dir, out);
  return kExitOk;
}

int do_report(const RunConfig& config, const std::string& input, std::ostream& out) {
  std::vector<char> bytes;
  try {
    bytes = read_file_bytes(input);
  } catch (const IoError& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  Json json;
  try {
    json = Json::parse(std::string(bytes.begin(), bytes.end()));
  } catch (const Json::exception& e) {
    throw ReportError(std::string("report: ") + input + " is not JSON: " + e.what());
  }
  const Report report = report_from_json(json);
  const fs::path dir = prepare_run_dir(config, "report");
  const EmittedReport paths = emit_report(report, dir);
  out << report.experiment << ": " << report.conditions.size() << " runs\n";
  for (const auto& c : report.conditions) {
    out << "  " << c.condition << " fraction=" << format_double(c.fraction)
        << " iteration=" << c.iteration << " test_acc=" << format_double(c.test_acc) << "\n";
  }
  out << "wrote " << paths.json.string() << "\n" << "wrote " << paths.csv.string() << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectrogram classification toolkit", "specnet"};
  app.require_subcommand(1);
  Options opts;

  CLI::App* featurize = app.add_subcommand("featurize", "Extract and cache mel spectrograms");
  add_common(featurize, opts);
  forward(featurize, opts, "--sample-rate", "features.sample_rate", "Target sample rate (Hz)");
  forward(featurize, opts, "--log", "features.log_compress", "true | false");

  CLI::App* train = app.add_subcommand("train", "Ten-fold cross-validation on UrbanSound8K");
  add_common(train, opts);
  add_model(train, opts);
  forward(train, opts, "--max-epochs", "train.max_epochs", "Epoch guard per fold");
  forward(train, opts, "--patience", "train.patience", "Early-stopping patience");
  forward(train, opts, "--batch-size", "train.batch_size", "Minibatch size");
  forward(train, opts, "--lr", "train.learning_rate", "Learning rate");
  forward(train, opts, "--folds", "train.folds", "Test folds to run, e.g. 1,2,3", false, true);

  CLI::App* transfer = app.add_subcommand("transfer", "Transfer sweep onto speech-command tasks");
  add_common(transfer, opts);
  add_model(transfer, opts);
  forward(transfer, opts, "--epochs", "transfer.epochs", "Fixed epoch count");
  forward(transfer, opts, "--tasks", "transfer.tasks", "e.g. sc_lr2,sc_core20", true, true);
  forward(transfer, opts, "--inits", "transfer.inits", "fresh,pretrained", true, true);
  forward(transfer, opts, "--source", "transfer.source_checkpoint", "Checkpoint without adapter", true);
  forward(transfer, opts, "--source-multiscale", "transfer.source_checkpoint_multiscale",
          "Checkpoint with adapter", true);

  CLI::App* ablate = app.add_subcommand("ablate", "Training-data fraction ablation");
  add_common(ablate, opts);
  add_model(ablate, opts);
  forward(ablate, opts, "--epochs", "transfer.epochs", "Fixed epoch count");
  forward(ablate, opts, "--fractions", "ablation.fractions", "e.g. 0.25,0.5,0.75,1.0", false, true);
  forward(ablate, opts, "--iterations", "ablation.iterations", "Randomized subsets per fraction");
  forward(ablate, opts, "--init", "ablation.init", "fresh | pretrained", true);
  forward(ablate, opts, "--source", "transfer.source_checkpoint", "Checkpoint without adapter", true);
  forward(ablate, opts, "--source-multiscale", "transfer.source_checkpoint_multiscale",
          "Checkpoint with adapter", true);

  CLI::App* report = app.add_subcommand("report", "Re-emit a report as JSON and CSV");
  report->add_option("--input", opts.input, "report.json to read")->required();
  forward(report, opts, "--out", "run.out", "Output root", true);
  forward(report, opts, "--name", "run.name", "Run subdirectory name", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    config = build_config(opts);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (featurize->parsed()) return do_featurize(config, out);
    if (train->parsed()) return do_train(config, out);
    if (transfer->parsed()) return do_transfer(config, out);
    if (ablate->parsed()) return do_ablate(config, out);
    return do_report(config, opts.input, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DatasetError& e) {
    err << "dataset error: " << e.what() << "\n";
  } catch (const DecodeError& e) {
    err << "audio error: " << e.what() << "\n";
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
  } catch (const ReportError& e) {
    err << "report error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitRuntime;
}

}  // namespace specnet
