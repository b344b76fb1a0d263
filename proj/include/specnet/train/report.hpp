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

#ifndef SPECNET_TRAIN_REPORT_HPP_
#define SPECNET_TRAIN_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace specnet {

using Json = nlohmann::ordered_json;

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochRecord {
  double train_loss = 0.0;
  double train_acc = 0.0;
  std::optional<double> val_acc;
};

struct ConditionResult {
  std::string condition;  // e.g. "fold=3" or "init=pretrained,multiscale=true,task=sc_lr2"
  double fraction = 1.0;
  std::size_t iteration = 0;
  Json fields = Json::object();  // experiment-specific condition details
  std::vector<EpochRecord> epochs;
  double test_acc = 0.0;
  double duration_s = 0.0;
};

struct Report {
  std::string experiment;  // crossval | transfer | ablation
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<ConditionResult> conditions;
  Json summary = Json::object();

  // Throws ReportError on an empty run list or an accuracy outside [0, 1].
  void validate() const;
};

// Timing fields are dropped when `include_timing` is false, which makes two
// runs with the same config and seed compare equal.
Json report_to_json(const Report& report, bool include_timing = true);
Report report_from_json(const Json& json);

inline constexpr const char* kReportCsvHeader = "condition,fraction,iteration,test_acc";
std::string report_to_csv(const Report& report);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

struct EmittedReport {
  std::filesystem::path json;
  std::filesystem::path csv;
};

// Writes report.json and report.csv into `out_dir`, each atomically.
EmittedReport emit_report(const Report& report, const std::filesystem::path& out_dir);

// Mean test accuracy per fraction, in first-seen order.
Json summarize_by_fraction(const std::vector<ConditionResult>& conditions);

}  // namespace specnet

#endif  // SPECNET_TRAIN_REPORT_HPP_
