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

#include "specnet/train/report.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "specnet/util/io.hpp"

namespace specnet {

namespace fs = std::filesystem;

void Report::validate() const {
  if (conditions.empty()) throw ReportError("report: no runs recorded");
  for (const auto& c : conditions) {
    if (!(c.test_acc >= 0.0 && c.test_acc <= 1.0)) {
      throw ReportError("report: condition '" + c.condition + "' has test accuracy " +
                        format_double(c.test_acc));
    }
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

Json report_to_json(const Report& report, bool include_timing) {
  report.validate();
  Json out;
  out["experiment"] = report.experiment;
  out["config"] = report.config;
  out["seed"] = report.seed;
  out["class_names"] = report.class_names;
  Json conditions = Json::array();
  for (const auto& c : report.conditions) {
    Json entry;
    entry["condition"] = c.condition;
    entry["fraction"] = c.fraction;
    entry["iteration"] = c.iteration;
    for (const auto& [key, value] : c.fields.items()) entry[key] = value;
    Json epochs = Json::array();
    for (const auto& e : c.epochs) {
      Json row;
      row["train_loss"] = e.train_loss;
      row["train_acc"] = e.train_acc;
      row["val_acc"] = e.val_acc ? Json(*e.val_acc) : Json(nullptr);
      epochs.push_back(std::move(row));
    }
    entry["epochs"] = std::move(epochs);
    entry["test_acc"] = c.test_acc;
    if (include_timing) entry["duration_s"] = c.duration_s;
    conditions.push_back(std::move(entry));
  }
  out["conditions"] = std::move(conditions);
  out["summary"] = report.summary;
  return out;
}

Report report_from_json(const Json& json) {
  static const std::vector<std::string> kReserved = {
      "condition", "fraction", "iteration", "epochs", "test_acc", "duration_s"};
  Report report;
  try {
    report.experiment = json.at("experiment").get<std::string>();
    report.config = json.value("config", Json::object());
    report.seed = json.value("seed", std::uint64_t(0));
    report.class_names = json.value("class_names", std::vector<std::string>{});
    report.summary = json.value("summary", Json::object());
    for (const auto& entry : json.at("conditions")) {
      ConditionResult c;
      c.condition = entry.at("condition").get<std::string>();
      c.fraction = entry.value("fraction", 1.0);
      c.iteration = entry.value("iteration", std::size_t(0));
      c.test_acc = entry.at("test_acc").get<double>();
      c.duration_s = entry.value("duration_s", 0.0);
      for (const auto& e : entry.value("epochs", Json::array())) {
        EpochRecord r;
        r.train_loss = e.at("train_loss").get<double>();
        r.train_acc = e.at("train_acc").get<double>();
        if (!e.at("val_acc").is_null()) r.val_acc = e.at("val_acc").get<double>();
        c.epochs.push_back(r);
      }
      for (const auto& [key, value] : entry.items()) {
        if (std::find(kReserved.begin(), kReserved.end(), key) == kReserved.end()) {
          c.fields[key] = value;
        }
      }
      report.conditions.push_back(std::move(c));
    }
  } catch (const Json::exception& e) {
    throw ReportError(std::string("report: malformed JSON: ") + e.what());
  }
  report.validate();
  return report;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string report_to_csv(const Report& report) {
  report.validate();
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& c : report.conditions) {
    out += csv_field(c.condition) + "," + format_double(c.fraction) + "," +
           std::to_string(c.iteration) + "," + format_double(c.test_acc) + "\n";
  }
  return out;
}

EmittedReport emit_report(const Report& report, const fs::path& out_dir) {
  const std::string json_text = report_to_json(report).dump(2) + "\n";
  const std::string csv_text = report_to_csv(report);
  try {
    fs::create_directories(out_dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(std::string("cannot create ") + out_dir.string() + ": " + e.what());
  }
  EmittedReport paths{out_dir / "report.json", out_dir / "report.csv"};
  write_file_atomic(paths.json, json_text);
  write_file_atomic(paths.csv, csv_text);
  return paths;
}

Json summarize_by_fraction(const std::vector<ConditionResult>& conditions) {
  std::vector<double> order;
  std::map<double, std::vector<double>> accs;
  for (const auto& c : conditions) {
    if (!accs.count(c.fraction)) order.push_back(c.fraction);
    accs[c.fraction].push_back(c.test_acc);
  }
  Json out = Json::array();
  for (double f : order) {
    const auto& values = accs[f];
    double total = 0.0;
    for (double v : values) total += v;
    Json row;
    row["fraction"] = f;
    row["mean_test_acc"] = total / double(values.size());
    row["test_acc"] = values;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace specnet
