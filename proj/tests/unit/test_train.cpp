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

#include <algorithm>
#include <atomic>
#include <set>

#include "doctest.h"
#include "fixture_data.hpp"
#include "specnet/data/sampling.hpp"
#include "specnet/train/early_stopping.hpp"
#include "specnet/train/experiments.hpp"
#include "specnet/train/optimizer.hpp"
#include "specnet/train/trainer.hpp"
#include "test_util.hpp"

using namespace specnet;

namespace {

NamedTensor scalar_param(const std::string& name, float value) {
  Tensor t({1}, std::vector<float>{value});
  t.set_requires_grad(true);
  return {name, t};
}

void set_grad(Tensor& t, float g) {
  for (auto& v : t.mutable_grad()) v = g;
}

ModelSpec tiny(std::size_t classes, bool multiscale = false) {
  ModelSpec s;
  s.family = Family::kDenseNet;
  s.preset = "tiny";
  s.num_classes = classes;
  s.use_multiscale = multiscale;
  s.per_branch_channels = 2;
  return s;
}

// Class 0 lights the top half of an 8x8 patch, class 1 the bottom half.
LabeledSet halves(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  LabeledSet set;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int label = int(i % 2);
    Spectrogram s;
    s.n_frames = 8;
    s.n_mels = 8;
    s.data.resize(64);
    for (std::size_t t = 0; t < 8; ++t)
      for (std::size_t m = 0; m < 8; ++m) {
        const bool lit = (t < 4) == (label == 0);
        s.data[t * 8 + m] = (lit ? 1.0f : -1.0f) + noise(rng);
      }
    set.features.push_back(s);
    set.labels.push_back(label);
  }
  return set;
}

std::uint64_t full_checksum(Model& m) { return parameter_checksum(m, std::nullopt, false); }

}  // namespace

TEST_CASE("sgd step examples") {
  {
    ParamGroup g{"g", {scalar_param("p", 1.0f)}, 0.1, 0.0, 0.0};
    Sgd sgd({g});
    set_grad(g.params[0].tensor, 1.0f);
    sgd.step();
    CHECK(g.params[0].tensor.values()[0] == doctest::Approx(0.9).epsilon(1e-7));
  }
  {
    ParamGroup g{"g", {scalar_param("p", 0.0f)}, 0.1, 0.0, 0.9};
    Sgd sgd({g});
    for (int i = 0; i < 2; ++i) {
      set_grad(g.params[0].tensor, 1.0f);
      sgd.step();
    }
    CHECK(g.params[0].tensor.values()[0] == doctest::Approx(-0.29).epsilon(1e-6));
    CHECK(sgd.velocity(0, 0)[0] == doctest::Approx(1.9).epsilon(1e-6));
  }
  {
    ParamGroup g{"g", {scalar_param("p", 1.0f)}, 0.1, 1e-4, 0.0};
    Sgd sgd({g});
    set_grad(g.params[0].tensor, 0.0f);
    sgd.step();
    CHECK(g.params[0].tensor.values()[0] == doctest::Approx(0.99999).epsilon(1e-7));
  }
}

TEST_CASE("sgd matches a scalar momentum recurrence") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double lr = 0.001 + 0.1 * std::abs(u(rng)), wd = 1e-3 * std::abs(u(rng));
    const double mu = std::abs(u(rng));
    const float p0 = float(u(rng));
    ParamGroup g{"g", {scalar_param("p", p0)}, lr, wd, mu};
    Sgd sgd({g});
    double p_ref = p0, v_ref = 0.0;
    for (int step = 0; step < 100; ++step) {
      const float grad = float(u(rng));
      set_grad(g.params[0].tensor, grad);
      sgd.step();
      v_ref = mu * v_ref + (double(grad) + wd * p_ref);
      p_ref -= lr * v_ref;
    }
    CHECK(std::abs(double(g.params[0].tensor.values()[0]) - p_ref) <= 1e-5 * std::max(1.0, std::abs(p_ref)));
  }
  // In single precision with the same operation order the agreement is tight.
  ParamGroup g{"g", {scalar_param("p", 0.3f)}, 0.05, 1e-4, 0.9};
  Sgd sgd({g});
  float p = 0.3f, v = 0.0f;
  for (int step = 0; step < 100; ++step) {
    const float grad = float(u(rng));
    set_grad(g.params[0].tensor, grad);
    sgd.step();
    v = 0.9f * v + (grad + 1e-4f * p);
    p -= 0.05f * v;
    CHECK(std::abs(g.params[0].tensor.values()[0] - p) <= 1e-7);
  }
}

TEST_CASE("sgd errors and group handling") {
  NamedTensor p = scalar_param("p", 1.0f);
  Sgd sgd({ParamGroup{"g", {p}, 0.1, 0.0, 0.9}});
  CHECK_THROWS_AS(sgd.step(), OptimizerError);
  CHECK_THROWS(sgd.group("missing"));
  CHECK(sgd.group("g").learning_rate == 0.1);
  CHECK_THROWS(Sgd({ParamGroup{"g", {p}, -0.1, 0.0, 0.9}}));
  CHECK_THROWS(Sgd({ParamGroup{"g", {p}, 0.1, -1.0, 0.9}}));

  Model model(tiny(3), 2);
  const auto groups = head_body_groups(model, {0.005, 1e-4}, {0.001, 0.0}, 0.9);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].name == "head");
  CHECK(groups[0].params.size() == 2);
  std::size_t members = 0;
  std::set<std::string> seen;
  for (const auto& g : groups)
    for (const auto& np : g.params) {
      CHECK(seen.insert(np.name).second);
      ++members;
    }
  std::size_t trainable = 0;
  for (const auto& p : model.parameters()) trainable += p.trainable;
  CHECK(members == trainable);
  CHECK(single_group(model, {0.01, 0.0}, 0.9).front().params.size() == trainable);
}

TEST_CASE("zero body learning rate freezes the body") {
  Model model(tiny(2, true), 3);
  Sgd sgd(head_body_groups(model, {0.005, 1e-4}, {0.0, 0.0}, 0.9));
  const LabeledSet data = halves(10, 4);
  const auto body = parameter_checksum(model, ParamGroupTag::kBody, true);
  const auto head = parameter_checksum(model, ParamGroupTag::kHead, true);
  std::mt19937_64 rng(5);
  std::size_t steps = 0;
  while (steps < 10) steps += train_epoch(model, data, sgd, 4, rng).batches;
  CHECK(parameter_checksum(model, ParamGroupTag::kBody, true) == body);
  CHECK(parameter_checksum(model, ParamGroupTag::kHead, true) != head);
}

TEST_CASE("early stopping on the reference sequence") {
  const std::vector<double> seq = {.5, .7, .7, .7, .7, .7, .7, .7, .7, .7, .7, .7, .9, .9};
  Tensor weight({1}, 0.0f);
  std::size_t trained = 0;
  const FitResult fit = fit_with_early_stopping(
      100, 10,
      [&](std::size_t epoch) {
        weight.mutable_values()[0] = float(epoch);
        ++trained;
      },
      [&](std::size_t epoch) { return seq.at(epoch - 1); },
      [&] { return std::vector<NamedTensor>{{"w", weight}}; });
  CHECK(fit.stopped_early);
  CHECK(fit.epochs_run == 12);
  CHECK(trained == 12);
  CHECK(fit.best_epoch == 2);
  CHECK(fit.best_metric == .7);
  CHECK(weight.values()[0] == 2.0f);
}

TEST_CASE("early stopping properties on random sequences") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t patience = 1 + rng() % 6, max_epochs = 40;
    std::vector<double> seq(max_epochs);
    for (auto& v : seq) v = double(rng() % 8) / 8.0;  // coarse values force ties
    Tensor weight({1}, 0.0f);
    const FitResult fit = fit_with_early_stopping(
        max_epochs, patience, [&](std::size_t e) { weight.mutable_values()[0] = float(e); },
        [&](std::size_t e) { return seq[e - 1]; },
        [&] { return std::vector<NamedTensor>{{"w", weight}}; });
    const auto first_best = [&](std::size_t n) {
      return std::size_t(std::max_element(seq.begin(), seq.begin() + n) - seq.begin()) + 1;
    };
    const std::size_t best = first_best(fit.epochs_run);
    CHECK(fit.best_epoch == best);
    CHECK(weight.values()[0] == float(best));
    if (fit.stopped_early) {
      CHECK(fit.epochs_run == best + patience);
    } else {
      CHECK(fit.epochs_run == max_epochs);
    }
    for (std::size_t e = 1; e < fit.epochs_run; ++e) CHECK(first_best(e) + patience > e);
  }

  std::vector<double> rising(30);
  for (std::size_t i = 0; i < rising.size(); ++i) rising[i] = double(i) / 30.0;
  Tensor w({1}, 0.0f);
  const FitResult fit = fit_with_early_stopping(
      30, 3, [](std::size_t) {}, [&](std::size_t e) { return rising[e - 1]; },
      [&] { return std::vector<NamedTensor>{{"w", w}}; });
  CHECK_FALSE(fit.stopped_early);
  CHECK(fit.epochs_run == 30);
  CHECK(fit.best_epoch == 30);
}

TEST_CASE("early stopping snapshots are independent copies") {
  EarlyStopping stop(2);
  Tensor w({2}, std::vector<float>{1, 2});
  std::vector<NamedTensor> state{{"w", w}};
  CHECK_FALSE(stop.observe(1, 0.5, state));
  w.mutable_values()[0] = 9;
  CHECK_FALSE(stop.observe(2, 0.5, state));
  CHECK(stop.observe(3, 0.4, state));
  CHECK(stop.should_stop());
  CHECK(stop.best_epoch() == 1);
  stop.restore(state);
  CHECK(w.values()[0] == 1.0f);
}

TEST_CASE("batching") {
  CHECK(batch_count(10, 4) == 3);
  CHECK(batch_count(8, 4) == 2);
  CHECK(batch_count(1, 64) == 1);
  Model model(tiny(2), 7);
  Sgd sgd(single_group(model, {0.01, 0.0}, 0.9));
  std::mt19937_64 rng(8);
  LabeledSet ten = halves(5, 9);
  CHECK(train_epoch(model, ten, sgd, 4, rng).batches == 3);
  std::vector<int> labels;
  const std::size_t rows[] = {3, 1};
  const Tensor b = make_batch(ten, rows, &labels);
  CHECK(b.shape() == Shape{2, 1, 8, 8});
  CHECK(labels == std::vector<int>{1, 1});
  CHECK_THROWS(train_epoch(model, LabeledSet{}, sgd, 4, rng));
}

TEST_CASE("training is deterministic and reduces loss on a separable toy") {
  const LabeledSet data = halves(8, 10);
  auto run = [&](std::size_t epochs, std::vector<double>* losses) {
    Model model(tiny(2), 11);
    Sgd sgd(single_group(model, {0.01, 0.0}, 0.9));
    std::mt19937_64 rng(12);
    for (std::size_t e = 0; e < epochs; ++e) {
      const auto m = train_epoch(model, data, sgd, 4, rng);
      if (losses) losses->push_back(m.loss);
    }
    return full_checksum(model);
  };
  std::vector<double> losses;
  const auto a = run(5, &losses);
  CHECK(run(5, nullptr) == a);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("evaluate") {
  Model model(tiny(2), 13);
  std::mt19937_64 rng(14);
  for (auto& v : model.head().weight.mutable_values()) v = 0.0f;
  model.head().bias.mutable_values()[0] = 1.0f;
  model.head().bias.mutable_values()[1] = 0.0f;

  LabeledSet sixty_forty = halves(10, 15);
  for (std::size_t i = 0; i < sixty_forty.size(); ++i) sixty_forty.labels[i] = i < 12 ? 0 : 1;
  const auto before = full_checksum(model);
  const Metrics m = evaluate(model, sixty_forty, 8);
  CHECK(m.accuracy == doctest::Approx(0.6));
  CHECK(m.correct == 12);
  CHECK(m.total == 20);
  CHECK(full_checksum(model) == before);

  for (auto& l : sixty_forty.labels) l = 0;
  CHECK(evaluate(model, sixty_forty).accuracy == 1.0);
  CHECK_THROWS(evaluate(model, LabeledSet{}));
}

TEST_CASE("run_parallel visits every index once") {
  for (std::size_t jobs : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(17);
    run_parallel(17, jobs, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(run_parallel(4, 2, [](std::size_t i) {
                    if (i == 2) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("featurize with a cache directory") {
  const auto dir = test::scratch_dir("featurize");
  const Dataset d = load_dataset(Task::kScLr2, test::fixture("speech_commands_mini"));
  const FeaturePipeline pipeline{FeatureConfig{}, 0.25};
  const FeatureStore first = featurize(d, pipeline, dir, 2);
  CHECK(first.by_id.size() == 6);
  CHECK(first.cache_paths.size() == 6);
  for (const auto& [id, path] : first.cache_paths) CHECK(std::filesystem::exists(path));
  const FeatureStore second = featurize(d, pipeline, dir, 1);
  for (const auto& [id, spec] : first.by_id) {
    CHECK(second.at(id).data == spec.data);
    CHECK(spec.n_mels == 64);
    CHECK(spec.n_frames == 9);  // 5512 samples at 22050 Hz
  }
  CHECK_THROWS(first.at("nope"));

  const auto& path = d.examples[0].audio_path;
  const std::string key = feature_cache_key(path, pipeline);
  CHECK(key.size() == 16);
  FeaturePipeline other = pipeline;
  other.config.n_mels = 40;
  CHECK(feature_cache_key(path, other) != key);
  other = pipeline;
  other.clip_seconds = 1.0;
  CHECK(feature_cache_key(path, other) != key);
  CHECK(default_clip_seconds(Task::kUs8k) == 4.0);
  CHECK(default_clip_seconds(Task::kScAll30) == 1.0);
}

TEST_CASE("crossval, transfer and ablation on the fixtures") {
  const auto dir = test::scratch_dir("experiments");
  const PreparedData us8k = test::prepare_fixture(Task::kUs8k, test::fixture("us8k"));

  CrossvalConfig cv;
  cv.model = tiny(10);
  cv.train.batch_size = 8;
  cv.train.max_epochs = 3;
  cv.train.patience = 2;
  cv.seed = 3;
  cv.checkpoint_path = dir / "plain.spnw";
  const Report r1 = run_crossval(cv, us8k);
  CHECK(r1.experiment == "crossval");
  REQUIRE(r1.conditions.size() == 10);
  double mean = 0.0;
  for (std::size_t f = 0; f < 10; ++f) {
    const auto& c = r1.conditions[f];
    CHECK(c.fields["test_fold"] == int(f + 1));
    CHECK(c.fields["train_examples"] == 16);
    CHECK(c.epochs.size() == c.fields["epochs_run"].get<std::size_t>());
    CHECK(c.epochs.size() <= 3);
    CHECK(c.test_acc >= 0.0);
    CHECK(c.test_acc <= 1.0);
    mean += c.test_acc / 10.0;
  }
  CHECK(r1.summary["mean_test_acc"].get<double>() == doctest::Approx(mean));
  CHECK(std::filesystem::exists(cv.checkpoint_path));
  cv.jobs = 2;
  CHECK(report_to_json(run_crossval(cv, us8k), false) == report_to_json(r1, false));

  CrossvalConfig cvm = cv;
  cvm.model = tiny(10, true);
  cvm.checkpoint_path = dir / "multiscale.spnw";
  cvm.folds = {1};
  CHECK(run_crossval(cvm, us8k).conditions.size() == 1);

  std::map<Task, PreparedData> speech;
  for (Task t : {Task::kScLr2, Task::kScCore20, Task::kScAll30})
    speech.emplace(t, test::prepare_fixture(t, test::fixture("speech_commands")));
  TransferConfig tc;
  tc.model = tiny(10);
  tc.transfer.epochs = 2;
  tc.transfer.batch_size = 8;
  tc.seed = 5;
  tc.sources = {cv.checkpoint_path, cvm.checkpoint_path};
  const TaskDataProvider provider = [&](Task t) -> const PreparedData& { return speech.at(t); };
  const Report tr = run_transfer(tc, provider);
  REQUIRE(tr.conditions.size() == 12);
  std::set<std::string> names;
  for (const auto& c : tr.conditions) {
    names.insert(c.condition);
    CHECK(c.epochs.size() == 2);
    if (c.fields["init"] == "pretrained") {
      CHECK(c.fields["initial_body_checksum"] == c.fields["source_body_checksum"]);
    }
  }
  CHECK(names.size() == 12);
  CHECK(report_to_json(run_transfer(tc, provider), false) == report_to_json(tr, false));

  TransferConfig mismatched = tc;
  mismatched.sources = {cvm.checkpoint_path, cv.checkpoint_path};
  CHECK_THROWS_AS(run_transfer(mismatched, provider), CheckpointError);

  AblationConfig ac;
  ac.model = tiny(10);
  ac.transfer = tc.transfer;
  ac.seed = 7;
  ac.seed_base = 100;
  const PreparedData& lr = speech.at(Task::kScLr2);
  const Report ab = run_ablation(ac, lr);
  REQUIRE(ab.conditions.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& c = ab.conditions[i];
    CHECK(c.fraction == ac.fractions[i / 5]);
    CHECK(c.iteration == i % 5);
    CHECK(c.fields["subset_seed"] == 100 + i % 5);
    CHECK(c.fields["test_examples"] == 4);
    const std::size_t per_class = stratified_count(4, c.fraction);
    CHECK(c.fields["train_examples"] == 2 * per_class);
  }
  CHECK(report_to_json(run_ablation(ac, lr), false) == report_to_json(ab, false));
  AblationConfig bad = ac;
  bad.fractions = {0.0};
  CHECK_THROWS(run_ablation(bad, lr));
}

TEST_CASE("transfer model construction") {
  const auto dir = test::scratch_dir("transfer_model");
  Model source(tiny(10, true), 20);
  source.forward(Tensor({4, 1, 16, 16}, 0.5f), Mode::kTrain);
  save_model(source, dir / "s.spnw");
  const auto body = parameter_checksum(source, ParamGroupTag::kBody, false);

  Model pre = make_transfer_model(tiny(10, true), Init::kPretrained, dir / "s.spnw", 2, 1, false);
  CHECK(parameter_checksum(pre, ParamGroupTag::kBody, false) == body);
  CHECK(pre.head().weight.shape() == Shape{pre.feature_dim(), 2});

  Model reset = make_transfer_model(tiny(10, true), Init::kPretrained, dir / "s.spnw", 2, 1, true);
  CHECK(parameter_checksum(reset, ParamGroupTag::kBody, true) ==
        parameter_checksum(source, ParamGroupTag::kBody, true));
  CHECK(parameter_checksum(reset, ParamGroupTag::kBody, false) != body);

  Model fresh = make_transfer_model(tiny(10, true), Init::kFresh, {}, 2, 1, false);
  CHECK(fresh.spec().num_classes == 2);
  CHECK_THROWS_AS(make_transfer_model(tiny(10, false), Init::kPretrained, dir / "s.spnw", 2, 1, false),
                  CheckpointError);
  CHECK(parse_init(to_string(Init::kPretrained)) == Init::kPretrained);
}
