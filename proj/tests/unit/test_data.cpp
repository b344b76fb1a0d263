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
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "specnet/data/dataset.hpp"
#include "specnet/data/folds.hpp"
#include "specnet/data/sampling.hpp"
#include "test_util.hpp"

using namespace specnet;
namespace fs = std::filesystem;

namespace {

std::vector<Example> two_class(std::size_t a, std::size_t b) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < a + b; ++i) {
    Example e;
    e.id = "ex" + std::to_string(1000 + i);
    e.label = i < a ? 0 : 1;
    out.push_back(e);
  }
  return out;
}

std::map<int, std::size_t> counts(const std::vector<Example>& xs) {
  std::map<int, std::size_t> m;
  for (const auto& e : xs) ++m[e.label];
  return m;
}

std::set<std::string> ids(const std::vector<Example>& xs) {
  std::set<std::string> s;
  for (const auto& e : xs) s.insert(e.id);
  return s;
}

fs::path write_csv(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "manifest.csv";
  std::ofstream(p) << body;
  return p;
}

std::string error_of(const fs::path& csv) {
  try {
    load_urbansound_manifest(csv, csv.parent_path());
  } catch (const DatasetError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("urbansound fixture manifest") {
  const Dataset d = load_dataset(Task::kUs8k, test::fixture("us8k"));
  CHECK(d.examples.size() == 20);
  CHECK(d.num_classes() == 10);
  CHECK(d.class_names == urbansound_class_names());
  CHECK(std::is_sorted(d.class_names.begin(), d.class_names.end()));
  std::map<int, int> per_fold;
  for (const auto& e : d.examples) {
    REQUIRE(e.fold.has_value());
    CHECK_FALSE(e.split.has_value());
    ++per_fold[*e.fold];
    CHECK(fs::exists(e.audio_path));
    CHECK(e.audio_path.parent_path().filename() == "fold" + std::to_string(*e.fold));
  }
  CHECK(per_fold.size() == 10);
  for (const auto& [fold, n] : per_fold) CHECK(n == 2);
  CHECK(std::is_sorted(d.examples.begin(), d.examples.end(),
                       [](const Example& a, const Example& b) { return a.id < b.id; }));
  CHECK(d.class_counts()[0] == 10);
  CHECK(d.class_counts()[8] == 10);
  CHECK_NOTHROW(d.validate());
  CHECK(kUrbanSoundExampleCount == 8732);
}

TEST_CASE("urbansound manifest errors name the row") {
  const auto dir = test::scratch_dir("manifest");
  const std::string header = "slice_file_name,fsID,start,end,salience,fold,classID,class\n";
  CHECK(error_of(write_csv(dir, header + "a.wav,1,0,1,1,3,2,x\nb.wav,1,0,1,1,11,2,x\n")).find("line 3") !=
        std::string::npos);
  CHECK(error_of(write_csv(dir, header + "a.wav,1,0,1,1,0,2,x\n")).find("fold") != std::string::npos);
  CHECK(error_of(write_csv(dir, header + "a.wav,1,0,1,1,3,10,x\n")).find("line 2") != std::string::npos);
  CHECK(error_of(write_csv(dir, header + "a.wav,1,0,1,1,3,2,x\na.wav,1,0,1,1,3,2,x\n")).find("duplicate") !=
        std::string::npos);
  CHECK(error_of(write_csv(dir, "slice_file_name,classID\na.wav,1\n")).find("fold") != std::string::npos);
  CHECK_FALSE(error_of(write_csv(dir, "")).empty());
  CHECK_FALSE(error_of(dir / "missing.csv").empty());

  // Quoted fields and the salience column are tolerated.
  const Dataset ok = load_urbansound_manifest(
      write_csv(dir, header + "\"q,1.wav\",1,0,1,2,4,3,\"dog, bark\"\n"), dir);
  REQUIRE(ok.examples.size() == 1);
  CHECK(ok.examples[0].id == "q,1.wav");
  CHECK(ok.examples[0].label == 3);
  CHECK(*ok.examples[0].fold == 4);
  CHECK(ok.examples[0].audio_path == dir / "fold4" / "q,1.wav");
}

TEST_CASE("speech commands fixtures") {
  const Dataset mini = load_speech_commands(test::fixture("speech_commands_mini"), Task::kScLr2);
  CHECK(mini.examples.size() == 6);
  CHECK(mini.class_names == std::vector<std::string>{"left", "right"});
  std::size_t test_split = 0;
  for (const auto& e : mini.examples) {
    REQUIRE(e.split.has_value());
    CHECK_FALSE(e.fold.has_value());
    if (*e.split == Split::kTest) {
      ++test_split;
      CHECK(e.id == "left/00000000_nohash_0.wav");
    }
  }
  CHECK(test_split == 1);

  const Dataset full = load_speech_commands(test::fixture("speech_commands"), Task::kScLr2);
  const SplitExamples s = split_by_list(full);
  CHECK(s.test.size() == 4);
  CHECK(s.val.size() == 4);
  CHECK(s.train.size() == 8);
  CHECK(counts(s.test) == std::map<int, std::size_t>{{0, 2}, {1, 2}});
  CHECK_THROWS_AS(split_by_fold(full, make_fold_plan(1)), DatasetError);
}

TEST_CASE("speech commands errors") {
  const auto dir = test::scratch_dir("sc");
  fs::create_directories(dir / "left");
  fs::create_directories(dir / "right");
  std::ofstream(dir / "left" / "a.wav") << "x";
  CHECK_THROWS_AS(load_speech_commands(dir, Task::kScLr2), DatasetError);  // no list files
  std::ofstream(dir / "testing_list.txt");
  std::ofstream(dir / "validation_list.txt");
  CHECK_THROWS_AS(load_speech_commands(dir, Task::kScLr2), DatasetError);  // right/ is empty
  std::ofstream(dir / "right" / "b.wav") << "x";
  CHECK(load_speech_commands(dir, Task::kScLr2).examples.size() == 2);
  CHECK_THROWS_AS(load_speech_commands(dir / "nowhere", Task::kScLr2), DatasetError);
  CHECK_THROWS_AS(load_speech_commands(dir, Task::kUs8k), std::invalid_argument);
}

TEST_CASE("task word sets nest") {
  const auto& lr = speech_command_words(Task::kScLr2);
  const auto& core = speech_command_words(Task::kScCore20);
  const auto& all = speech_command_words(Task::kScAll30);
  CHECK(lr.size() == 2);
  CHECK(core.size() == 20);
  CHECK(all.size() == 30);
  for (const auto* words : {&lr, &core, &all}) {
    CHECK(std::is_sorted(words->begin(), words->end()));
    CHECK(std::set<std::string>(words->begin(), words->end()).size() == words->size());
  }
  CHECK(std::includes(core.begin(), core.end(), lr.begin(), lr.end()));
  CHECK(std::includes(all.begin(), all.end(), core.begin(), core.end()));
  for (const char* digit : {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"}) {
    CHECK(std::binary_search(core.begin(), core.end(), digit));
  }
  for (Task t : {Task::kUs8k, Task::kScLr2, Task::kScCore20, Task::kScAll30}) CHECK(parse_task(to_string(t)) == t);
  CHECK_THROWS(parse_task("sc_all31"));
}

TEST_CASE("fold plans partition the ten folds") {
  const FoldPlan last = make_fold_plan(10);
  CHECK(last.val_fold == 1);
  CHECK(last.train_folds == std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9});
  const FoldPlan first = make_fold_plan(1);
  CHECK(first.val_fold == 2);
  CHECK(first.train_folds == std::vector<int>{3, 4, 5, 6, 7, 8, 9, 10});
  for (int t = 1; t <= kNumFolds; ++t) {
    const FoldPlan p = make_fold_plan(t);
    CHECK(p.val_fold == t % 10 + 1);
    CHECK(p.val_fold != p.test_fold);
    std::multiset<int> all(p.train_folds.begin(), p.train_folds.end());
    all.insert(p.test_fold);
    all.insert(p.val_fold);
    CHECK(all == std::multiset<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  }
  CHECK_THROWS(make_fold_plan(0));
  CHECK_THROWS(make_fold_plan(11));

  const Dataset d = load_dataset(Task::kUs8k, test::fixture("us8k"));
  const SplitExamples s = split_by_fold(d, make_fold_plan(3));
  CHECK(s.test.size() == 2);
  CHECK(s.val.size() == 2);
  CHECK(s.train.size() == 16);
  for (const auto& e : s.test) CHECK(*e.fold == 3);
  for (const auto& e : s.val) CHECK(*e.fold == 4);
}

TEST_CASE("stratified fraction") {
  const auto xs = two_class(60, 40);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto half = stratified_fraction(xs, 0.5, seed);
    CHECK(counts(half) == std::map<int, std::size_t>{{0, 30}, {1, 20}});
    CHECK(ids(stratified_fraction(xs, 1.0, seed)) == ids(xs));
  }
  CHECK(ids(stratified_fraction(xs, 0.25, 7)) == ids(stratified_fraction(xs, 0.25, 7)));
  std::set<std::set<std::string>> memberships;
  for (std::uint64_t seed = 100; seed < 105; ++seed) memberships.insert(ids(stratified_fraction(xs, 0.5, seed)));
  CHECK(memberships.size() == 5);

  // Input order is preserved among the kept examples.
  const auto kept = stratified_fraction(xs, 0.75, 3);
  CHECK(std::is_sorted(kept.begin(), kept.end(), [](const Example& a, const Example& b) { return a.id < b.id; }));

  CHECK(stratified_count(3, 0.25) == 1);
  CHECK(stratified_count(1, 0.1) == 1);
  CHECK(stratified_count(10, 0.25) == 3);
  CHECK(stratified_count(0, 0.5) == 0);
  CHECK_THROWS(stratified_fraction(xs, 0.0, 1));
  CHECK_THROWS(stratified_fraction(xs, 1.5, 1));
}

TEST_CASE("stratified fraction keeps proportions for random class sizes") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Example> xs;
    std::map<int, std::size_t> sizes;
    const int classes = 1 + int(rng() % 6);
    for (int c = 0; c < classes; ++c) {
      const std::size_t n = 1 + rng() % 40;
      sizes[c] = n;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(Example{"c" + std::to_string(c) + "_" + std::to_string(i), {}, c, std::nullopt, std::nullopt});
    }
    const double fraction = double(1 + rng() % 100) / 100.0;
    const auto got = counts(stratified_fraction(xs, fraction, rng()));
    for (const auto& [c, n] : sizes) {
      const double target = std::round(fraction * double(n));
      CHECK(got.at(c) >= 1);
      CHECK(std::abs(double(got.at(c)) - std::max(1.0, target)) <= 1.0);
    }
  }
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.task = Task::kScLr2;
  d.class_names = {"left", "right"};
  d.examples.push_back(Example{"left/a", "a", 0, std::nullopt, Split::kTrain});
  CHECK_NOTHROW(d.validate());
  d.examples.push_back(Example{"left/b", "b", 2, std::nullopt, Split::kTrain});
  CHECK_THROWS_AS(d.validate(), DatasetError);
  d.examples.back().label = 1;
  d.examples.back().fold = 3;
  CHECK_THROWS_AS(d.validate(), DatasetError);
  d.examples.back().fold.reset();
  d.class_names = {"left", "left"};
  CHECK_THROWS_AS(d.validate(), DatasetError);
}
