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

#include "specnet/train/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <thread>

#include "specnet/data/folds.hpp"
#include "specnet/data/sampling.hpp"
#include "specnet/train/early_stopping.hpp"
#include "specnet/train/trainer.hpp"

namespace specnet {

namespace fs = std::filesystem;

std::string to_string(Init init) { return init == Init::kFresh ? "fresh" : "pretrained"; }

Init parse_init(const std::string& text) {
  if (text == "fresh") return Init::kFresh;
  if (text == "pretrained") return Init::kPretrained;
  throw std::invalid_argument("unknown init '" + text + "'");
}

void run_parallel(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json train_settings_json(const TrainSettings& t) {
  Json j;
  j["batch_size"] = t.batch_size;
  j["learning_rate"] = t.learning_rate;
  j["momentum"] = t.momentum;
  j["weight_decay"] = t.weight_decay;
  j["patience"] = t.patience;
  j["max_epochs"] = t.max_epochs;
  return j;
}

Json transfer_settings_json(const TransferSettings& t) {
  Json j;
  j["epochs"] = t.epochs;
  j["head_lr"] = t.head_lr;
  j["head_wd"] = t.head_wd;
  j["body_lr"] = t.body_lr;
  j["body_wd"] = t.body_wd;
  j["momentum"] = t.momentum;
  j["batch_size"] = t.batch_size;
  j["reset_batchnorm"] = t.reset_batchnorm;
  return j;
}

Json features_json(const FeatureConfig& f) {
  Json j;
  j["fingerprint"] = f.fingerprint();
  return j;
}

struct Splits {
  LabeledSet train, val, test;
};

Splits prepare_splits(const SplitExamples& parts, const PreparedData& data) {
  const Normalizer norm = fit_on(parts.train, data.features, data.feature_config);
  return {make_labeled_set(parts.train, data.features, norm),
          make_labeled_set(parts.val, data.features, norm),
          make_labeled_set(parts.test, data.features, norm)};
}

// Fixed-length training with the two-group optimizer; no early stopping.
ConditionResult train_fixed_epochs(Model& model, const Splits& splits,
                                   const TransferSettings& settings, std::uint64_t shuffle_seed) {
  ConditionResult result;
  Sgd optimizer(head_body_groups(model, {settings.head_lr, settings.head_wd},
                                 {settings.body_lr, settings.body_wd}, settings.momentum));
  std::mt19937_64 rng(shuffle_seed);
  for (std::size_t epoch = 1; epoch <= settings.epochs; ++epoch) {
    const EpochMetrics m = train_epoch(model, splits.train, optimizer, settings.batch_size, rng);
    EpochRecord record{m.loss, m.accuracy, std::nullopt};
    if (!splits.val.empty()) record.val_acc = evaluate(model, splits.val, settings.batch_size).accuracy;
    result.epochs.push_back(record);
  }
  result.test_acc = evaluate(model, splits.test, settings.batch_size).accuracy;
  return result;
}

std::uint64_t body_checksum(Model& model) {
  return parameter_checksum(model, ParamGroupTag::kBody, true);
}

}  // namespace

Report run_crossval(const CrossvalConfig& config, const PreparedData& data) {
  if (data.dataset.task != Task::kUs8k) {
    throw std::invalid_argument("crossval: needs a dataset with folds (us8k)");
  }
  std::vector<int> folds = config.folds;
  if (folds.empty()) {
    for (int f = 1; f <= kNumFolds; ++f) folds.push_back(f);
  }
  ModelSpec spec = config.model;
  spec.num_classes = data.dataset.num_classes();
  spec.validate();

  std::vector<ConditionResult> results(folds.size());
  run_parallel(folds.size(), config.jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    const FoldPlan plan = make_fold_plan(folds[i]);
    const SplitExamples parts = split_by_fold(data.dataset, plan);
    if (parts.train.empty() || parts.val.empty() || parts.test.empty()) {
      throw DatasetError("crossval: test fold " + std::to_string(plan.test_fold) +
                         " leaves an empty train, validation or test split");
    }
    const Splits splits = prepare_splits(parts, data);
    const std::uint64_t seed = config.seed + std::uint64_t(plan.test_fold);
    Model model(spec, seed);
    Sgd optimizer(single_group(model, {config.train.learning_rate, config.train.weight_decay},
                               config.train.momentum));
    std::mt19937_64 rng(seed);

    ConditionResult& r = results[i];
    const FitResult fit = fit_with_early_stopping(
        config.train.max_epochs, config.train.patience,
        [&](std::size_t) {
          const EpochMetrics m =
              train_epoch(model, splits.train, optimizer, config.train.batch_size, rng);
          r.epochs.push_back({m.loss, m.accuracy, std::nullopt});
        },
        [&](std::size_t) {
          const double acc = evaluate(model, splits.val, config.train.batch_size).accuracy;
          r.epochs.back().val_acc = acc;
          return acc;
        },
        [&] { return model.state(); });

    r.condition = "fold=" + std::to_string(plan.test_fold);
    r.fields["test_fold"] = plan.test_fold;
    r.fields["val_fold"] = plan.val_fold;
    r.fields["train_examples"] = parts.train.size();
    r.fields["best_epoch"] = fit.best_epoch;
    r.fields["epochs_run"] = fit.epochs_run;
    r.fields["stopped_early"] = fit.stopped_early;
    r.test_acc = evaluate(model, splits.test, config.train.batch_size).accuracy;
    if (!config.checkpoint_path.empty() && plan.test_fold == config.checkpoint_fold) {
      save_model(model, config.checkpoint_path);
    }
    r.duration_s = seconds_since(start);
  });

  Report report;
  report.experiment = "crossval";
  report.seed = config.seed;
  report.class_names = data.dataset.class_names;
  report.config["model"] = Json::parse(spec.to_json());
  report.config["train"] = train_settings_json(config.train);
  report.config["features"] = features_json(data.feature_config);
  report.conditions = std::move(results);
  double total = 0.0;
  Json per_fold = Json::array();
  for (const auto& c : report.conditions) {
    total += c.test_acc;
    per_fold.push_back(c.test_acc);
  }
  report.summary["folds"] = report.conditions.size();
  report.summary["test_acc"] = per_fold;
  report.summary["mean_test_acc"] = total / double(report.conditions.size());
  report.validate();
  return report;
}

Model make_transfer_model(const ModelSpec& spec, Init init, const fs::path& source,
                          std::size_t num_classes, std::uint64_t seed, bool reset_batchnorm) {
  ModelSpec target = spec;
  target.num_classes = num_classes;
  if (init == Init::kFresh) return Model(target, seed);
  if (source.empty()) {
    throw std::invalid_argument(std::string("transfer: pretrained condition needs a source ") +
                                (spec.use_multiscale ? "multiscale " : "") + "checkpoint");
  }
  Model model = load_model(source);
  const ModelSpec& src = model.spec();
  if (src.family != spec.family || src.preset != spec.preset ||
      src.use_multiscale != spec.use_multiscale ||
      (spec.use_multiscale && src.per_branch_channels != spec.per_branch_channels) ||
      src.resolved_global_pool() != spec.resolved_global_pool()) {
    throw CheckpointError("transfer: checkpoint " + source.string() + " holds a " +
                          to_string(src.family) + "-" + src.preset +
                          (src.use_multiscale ? " with adapter" : "") + ", config asks for " +
                          to_string(spec.family) + "-" + spec.preset +
                          (spec.use_multiscale ? " with adapter" : ""));
  }
  model.replace_head(num_classes, seed);
  if (reset_batchnorm) model.reset_batchnorm_statistics();
  return model;
}

Report run_transfer(const TransferConfig& config, const TaskDataProvider& data) {
  struct Condition {
    Init init;
    bool multiscale;
    Task task;
  };
  std::vector<Condition> sweep;
  for (Task task : config.tasks) {
    if (!is_speech_task(task)) throw std::invalid_argument("transfer: target tasks must be speech tasks");
    for (Init init : config.inits) {
      for (bool ms : config.multiscale) sweep.push_back({init, ms, task});
    }
  }
  if (sweep.empty()) throw std::invalid_argument("transfer: empty sweep");
  // Resolve datasets up front so workers only read shared state.
  for (Task task : config.tasks) data(task);

  std::vector<ConditionResult> results(sweep.size());
  run_parallel(sweep.size(), config.jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    const Condition& cond = sweep[i];
    const PreparedData& prepared = data(cond.task);
    const Splits splits = prepare_splits(split_by_list(prepared.dataset), prepared);
    if (splits.train.empty() || splits.test.empty()) {
      throw DatasetError("transfer: task " + to_string(cond.task) + " has an empty train or test split");
    }
    ModelSpec spec = config.model;
    spec.use_multiscale = cond.multiscale;
    spec.input_channels = 0;
    const fs::path& source = config.sources.for_multiscale(cond.multiscale);
    Model model = make_transfer_model(spec, cond.init, source, prepared.dataset.num_classes(),
                                      config.seed, config.transfer.reset_batchnorm);
    const std::uint64_t initial_body = body_checksum(model);

    ConditionResult r = train_fixed_epochs(model, splits, config.transfer, config.seed);
    r.condition = "init=" + to_string(cond.init) + ",multiscale=" +
                  (cond.multiscale ? "true" : "false") + ",task=" + to_string(cond.task);
    r.fields["init"] = to_string(cond.init);
    r.fields["multiscale"] = cond.multiscale;
    r.fields["task"] = to_string(cond.task);
    r.fields["num_classes"] = prepared.dataset.num_classes();
    r.fields["epochs_run"] = r.epochs.size();
    r.fields["initial_body_checksum"] = hex64(initial_body);
    if (cond.init == Init::kPretrained) {
      r.fields["source_checkpoint"] = source.string();
      r.fields["source_body_checksum"] = hex64([&] {
        Model original = load_model(source);
        return body_checksum(original);
      }());
    }
    r.duration_s = seconds_since(start);
    results[i] = std::move(r);
  });

  Report report;
  report.experiment = "transfer";
  report.seed = config.seed;
  report.class_names = data(config.tasks.front()).dataset.class_names;
  report.config["model"] = Json::parse(config.model.to_json());
  report.config["transfer"] = transfer_settings_json(config.transfer);
  report.config["features"] = features_json(data(config.tasks.front()).feature_config);
  Json tasks = Json::object();
  for (Task task : config.tasks) tasks[to_string(task)] = data(task).dataset.class_names;
  report.summary["class_names_by_task"] = std::move(tasks);
  report.conditions = std::move(results);
  Json by_condition = Json::object();
  for (const auto& c : report.conditions) by_condition[c.condition] = c.test_acc;
  report.summary["conditions"] = report.conditions.size();
  report.summary["test_acc"] = std::move(by_condition);
  report.validate();
  return report;
}

Report run_ablation(const AblationConfig& config, const PreparedData& data) {
  if (config.fractions.empty() || config.iterations == 0) {
    throw std::invalid_argument("ablation: needs at least one fraction and one iteration");
  }
  for (double f : config.fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw std::invalid_argument("ablation: fraction " + format_double(f) + " outside (0, 1]");
    }
  }
  const SplitExamples full = is_speech_task(data.dataset.task)
                                 ? split_by_list(data.dataset)
                                 : split_by_fold(data.dataset, make_fold_plan(1));
  if (full.train.empty() || full.test.empty()) {
    throw DatasetError("ablation: empty train or test split");
  }
  const std::size_t n = config.fractions.size() * config.iterations;
  std::vector<ConditionResult> results(n);
  run_parallel(n, config.jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    const double fraction = config.fractions[i / config.iterations];
    const std::size_t iteration = i % config.iterations;
    const std::uint64_t run_seed = config.seed_base + iteration;
    SplitExamples parts;
    parts.train = stratified_fraction(full.train, fraction, run_seed);
    parts.val = full.val.empty() ? full.val : stratified_fraction(full.val, fraction, run_seed);
    parts.test = full.test;
    const Splits splits = prepare_splits(parts, data);

    Model model = make_transfer_model(config.model, config.init, config.source_checkpoint,
                                      data.dataset.num_classes(), config.seed,
                                      config.transfer.reset_batchnorm);
    ConditionResult r = train_fixed_epochs(model, splits, config.transfer, run_seed);
    r.condition = "init=" + to_string(config.init) + ",task=" + to_string(data.dataset.task);
    r.fraction = fraction;
    r.iteration = iteration;
    r.fields["subset_seed"] = run_seed;
    r.fields["train_examples"] = parts.train.size();
    r.fields["test_examples"] = parts.test.size();
    r.duration_s = seconds_since(start);
    results[i] = std::move(r);
  });

  Report report;
  report.experiment = "ablation";
  report.seed = config.seed;
  report.class_names = data.dataset.class_names;
  report.config["model"] = Json::parse(config.model.to_json());
  report.config["transfer"] = transfer_settings_json(config.transfer);
  report.config["features"] = features_json(data.feature_config);
  report.config["fractions"] = config.fractions;
  report.config["iterations"] = config.iterations;
  report.config["seed_base"] = config.seed_base;
  report.conditions = std::move(results);
  report.summary["runs"] = report.conditions.size();
  report.summary["by_fraction"] = summarize_by_fraction(report.conditions);
  report.validate();
  return report;
}

}  // namespace specnet
