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

#include "specnet/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace specnet {

namespace fs = std::filesystem;

std::string to_string(Task task) {
  switch (task) {
    case Task::kUs8k: return "us8k";
    case Task::kScLr2: return "sc_lr2";
    case Task::kScCore20: return "sc_core20";
    case Task::kScAll30: return "sc_all30";
  }
  return "?";
}

Task parse_task(const std::string& text) {
  if (text == "us8k") return Task::kUs8k;
  if (text == "sc_lr2") return Task::kScLr2;
  if (text == "sc_core20") return Task::kScCore20;
  if (text == "sc_all30") return Task::kScAll30;
  throw std::invalid_argument("unknown task '" + text + "'");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

bool is_speech_task(Task task) { return task != Task::kUs8k; }

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const auto& e : examples) counts.at(std::size_t(e.label))++;
  return counts;
}

void Dataset::validate() const {
  std::set<std::string> unique(class_names.begin(), class_names.end());
  if (unique.size() != class_names.size()) throw DatasetError("dataset: duplicate class names");
  for (const auto& e : examples) {
    if (e.label < 0 || std::size_t(e.label) >= class_names.size()) {
      throw DatasetError("dataset: example " + e.id + " has label " + std::to_string(e.label) +
                         " outside " + std::to_string(class_names.size()) + " classes");
    }
    if (e.fold.has_value() != (task == Task::kUs8k)) {
      throw DatasetError("dataset: example " + e.id + " fold presence does not match task");
    }
  }
}

const std::vector<std::string>& urbansound_class_names() {
  static const std::vector<std::string> names = {
      "air_conditioner", "car_horn", "children_playing", "dog_bark",  "drilling",
      "engine_idling",   "gun_shot", "jackhammer",       "siren",     "street_music"};
  return names;
}

const std::vector<std::string>& speech_command_words(Task task) {
  static const std::vector<std::string> lr2 = {"left", "right"};
  static const std::vector<std::string> core20 = [] {
    std::vector<std::string> w = {"yes",  "no",  "up",    "down", "left", "right", "on",
                                  "off",  "stop", "go",   "zero", "one",  "two",   "three",
                                  "four", "five", "six",  "seven", "eight", "nine"};
    std::sort(w.begin(), w.end());
    return w;
  }();
  static const std::vector<std::string> all30 = [] {
    std::vector<std::string> w = core20;
    for (const char* extra : {"bed", "bird", "cat", "dog", "happy", "house", "marvin", "sheila",
                              "tree", "wow"}) {
      w.emplace_back(extra);
    }
    std::sort(w.begin(), w.end());
    return w;
  }();
  switch (task) {
    case Task::kScLr2: return lr2;
    case Task::kScCore20: return core20;
    case Task::kScAll30: return all30;
    case Task::kUs8k: break;
  }
  throw std::invalid_argument("speech_command_words: not a speech task");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

int parse_int_field(const std::string& text, const std::string& what, std::size_t line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DatasetError("manifest line " + std::to_string(line_no) + ": " + what + " '" + text +
                       "' is not an integer");
  }
  return value;
}

std::set<std::string> read_list_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("speech commands: missing list file " + path.string());
  std::set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  return entries;
}

}  // namespace

Dataset load_urbansound_manifest(const fs::path& csv_path, const fs::path& audio_root) {
  std::ifstream in(csv_path);
  if (!in) throw DatasetError("cannot read manifest " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw DatasetError("manifest " + csv_path.string() + " is empty");
  const auto header = split_csv_line(line);
  auto column = [&header](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DatasetError("manifest: missing column '" + name + "'");
    return std::size_t(it - header.begin());
  };
  const std::size_t file_col = column("slice_file_name");
  const std::size_t fold_col = column("fold");
  const std::size_t class_col = column("classID");
  const std::size_t needed = std::max({file_col, fold_col, class_col}) + 1;

  Dataset ds;
  ds.task = Task::kUs8k;
  ds.class_names = urbansound_class_names();
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < needed) {
      throw DatasetError("manifest line " + std::to_string(line_no) + ": expected at least " +
                         std::to_string(needed) + " columns");
    }
    Example e;
    e.id = fields[file_col];
    const int fold = parse_int_field(fields[fold_col], "fold", line_no);
    if (fold < 1 || fold > 10) {
      throw DatasetError("manifest line " + std::to_string(line_no) + " (" + e.id + "): fold " +
                         std::to_string(fold) + " outside 1-10");
    }
    e.fold = fold;
    e.label = parse_int_field(fields[class_col], "classID", line_no);
    if (e.label < 0 || std::size_t(e.label) >= ds.class_names.size()) {
      throw DatasetError("manifest line " + std::to_string(line_no) + " (" + e.id +
                         "): unknown classID " + std::to_string(e.label));
    }
    if (!seen.insert(e.id).second) {
      throw DatasetError("manifest line " + std::to_string(line_no) + ": duplicate file " + e.id);
    }
    e.audio_path = audio_root / ("fold" + std::to_string(fold)) / e.id;
    ds.examples.push_back(std::move(e));
  }
  std::sort(ds.examples.begin(), ds.examples.end(),
            [](const Example& a, const Example& b) { return a.id < b.id; });
  ds.validate();
  return ds;
}

Dataset load_speech_commands(const fs::path& root, Task task) {
  if (!is_speech_task(task)) throw std::invalid_argument("load_speech_commands: not a speech task");
  if (!fs::is_directory(root)) throw DatasetError("speech commands: no directory " + root.string());
  const auto validation = read_list_file(root / "validation_list.txt");
  const auto testing = read_list_file(root / "testing_list.txt");

  std::set<std::string> present;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && !name.empty() && name[0] != '_') present.insert(name);
  }
  const auto& candidates = speech_command_words(task);
  Dataset ds;
  ds.task = task;
  for (const auto& word : candidates) {
    if (present.count(word)) ds.class_names.push_back(word);
  }
  if (ds.class_names.size() < 2) {
    throw DatasetError("speech commands: task " + to_string(task) + " finds " +
                       std::to_string(ds.class_names.size()) + " class directories under " +
                       root.string());
  }
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(root / ds.class_names[c])) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        files.push_back(entry.path().filename().string());
      }
    }
    if (files.empty()) throw DatasetError("speech commands: class directory '" +
                                          ds.class_names[c] + "' is empty");
    for (const auto& file : files) {
      Example e;
      e.id = ds.class_names[c] + "/" + file;
      e.audio_path = root / ds.class_names[c] / file;
      e.label = int(c);
      e.split = testing.count(e.id) ? Split::kTest
                : validation.count(e.id) ? Split::kVal
                                         : Split::kTrain;
      ds.examples.push_back(std::move(e));
    }
  }
  std::sort(ds.examples.begin(), ds.examples.end(),
            [](const Example& a, const Example& b) { return a.id < b.id; });
  ds.validate();
  return ds;
}

Dataset load_dataset(Task task, const fs::path& root, const fs::path& manifest) {
  if (task == Task::kUs8k) {
    const fs::path csv = manifest.empty() ? root / "metadata" / "UrbanSound8K.csv" : manifest;
    const fs::path audio = manifest.empty() ? root / "audio" : root;
    return load_urbansound_manifest(csv, audio);
  }
  return load_speech_commands(root, task);
}

}  // namespace specnet
