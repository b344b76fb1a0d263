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

#ifndef SPECNET_DATA_DATASET_HPP_
#define SPECNET_DATA_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace specnet {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { kUs8k, kScLr2, kScCore20, kScAll30 };
enum class Split { kTrain, kVal, kTest };

std::string to_string(Task task);
Task parse_task(const std::string& text);
std::string to_string(Split split);
bool is_speech_task(Task task);

struct Example {
  std::string id;
  std::filesystem::path audio_path;
  int label = 0;
  std::optional<int> fold;    // UrbanSound8K only
  std::optional<Split> split;  // Speech Commands only
};

struct Dataset {
  std::vector<Example> examples;
  std::vector<std::string> class_names;
  Task task = Task::kUs8k;

  std::size_t num_classes() const { return class_names.size(); }
  std::vector<std::size_t> class_counts() const;
  void validate() const;
};

// Size of the published UrbanSound8K release.
inline constexpr std::size_t kUrbanSoundExampleCount = 8732;

// Ordered by classID, which is also alphabetical.
const std::vector<std::string>& urbansound_class_names();

// Candidate words per speech task, sorted. sc_all30 lists the thirty words
// of the original release; directories present on disk decide the final set.
const std::vector<std::string>& speech_command_words(Task task);

// Reads a CSV with at least slice_file_name, fold and classID columns; audio
// lives at <audio_root>/fold<N>/<slice_file_name>.
Dataset load_urbansound_manifest(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& audio_root);

// <root>/<word>/<file>.wav plus validation_list.txt and testing_list.txt.
// Class names are the task's words found under root.
Dataset load_speech_commands(const std::filesystem::path& root, Task task);

Dataset load_dataset(Task task, const std::filesystem::path& root,
                     const std::filesystem::path& manifest = {});

}  // namespace specnet

#endif  // SPECNET_DATA_DATASET_HPP_
