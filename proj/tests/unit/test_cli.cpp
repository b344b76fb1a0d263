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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "specnet/cli/cli.hpp"
#include "specnet/cli/config.hpp"
#include "specnet/cli/run_config.hpp"
#include "specnet/util/io.hpp"
#include "test_util.hpp"

using namespace specnet;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "specnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string read_text(const fs::path& p) {
  const auto bytes = read_file_bytes(p);
  return {bytes.begin(), bytes.end()};
}

Json read_json(const fs::path& p) { return Json::parse(read_text(p)); }

// Report JSON with wall-clock fields and the run directory name dropped.
Json timeless(const fs::path& p) {
  Json j = report_to_json(report_from_json(read_json(p)), false);
  j["config"]["run"].erase("name");
  return j;
}

std::string without_name(std::string toml) {
  const auto at = toml.find("\nname = ");
  if (at != std::string::npos) toml.erase(at, toml.find('\n', at + 1) - at);
  return toml;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config values round-trip through text") {
  const std::vector<ConfigValue> values = {
      ConfigValue::of(true),
      ConfigValue::of(std::int64_t(-42)),
      ConfigValue::of(0.1),
      ConfigValue::of(3.0),
      ConfigValue::of(1e-8),
      ConfigValue::of(std::string("a \"quoted\" path\\x")),
      ConfigValue::of(std::vector<ConfigValue>{ConfigValue::of(0.25), ConfigValue::of(1.0)}),
      ConfigValue::of(std::vector<ConfigValue>{})};
  for (const auto& v : values) {
    const ConfigValue back = ConfigValue::parse(v.to_text());
    CHECK(back.type == v.type);
    CHECK(back.to_text() == v.to_text());
  }
  CHECK(ConfigValue::parse("3.0").type == ConfigValue::Type::kFloat);
  CHECK(ConfigValue::parse("3").type == ConfigValue::Type::kInt);
  CHECK(ConfigValue::parse("0.1").d == 0.1);
  CHECK_THROWS_AS(ConfigValue::parse("\"unterminated"), ConfigError);
  CHECK_THROWS_AS(ConfigValue::parse("bare words"), ConfigError);
}

TEST_CASE("config text parsing") {
  const ConfigTable t = parse_config_text("# comment\n[run]\nseed = 7  # trailing\n\n[train]\nfolds = [1, 2]\n");
  CHECK(t.at("run").at("seed").i == 7);
  CHECK(t.at("train").at("folds").list.size() == 2);
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[run]\nseed = 1\nseed = 2\n").find("line 3") != std::string::npos);
  CHECK(message("seed = 1\n").find("line 1") != std::string::npos);
  CHECK(message("[run]\nseed\n").find("line 2") != std::string::npos);
  CHECK(message("[run\n").find("line 1") != std::string::npos);
}

TEST_CASE("run config round-trips losslessly") {
  const RunConfig defaults;
  CHECK(RunConfig::from_text(defaults.to_text()).to_text() == defaults.to_text());

  RunConfig c;
  c.seed = 123456789012345ull;
  c.out = "/tmp/some dir";
  c.name = "x";
  c.jobs = 3;
  c.dataset = Task::kScCore20;
  c.root = "/data/sc";
  c.clip_seconds = 0.75;
  c.features.n_mels = 40;
  c.features.fmax = 7999.5;
  c.features.log_compress = true;
  c.features.normalization = NormalizationKind::kStdDev;
  c.model.family = Family::kResNet;
  c.model.preset = "tiny";
  c.model.use_multiscale = true;
  c.model.per_branch_channels = 4;
  c.model.global_pool = PoolKind::kMax;
  c.train.learning_rate = 0.0123;
  c.train.weight_decay = 1e-4;
  c.folds = {2, 5};
  c.transfer.head_lr = 0.004;
  c.transfer.reset_batchnorm = true;
  c.tasks = {Task::kScLr2};
  c.inits = {Init::kPretrained};
  c.multiscale_sweep = {true};
  c.source_checkpoint = "a.spnw";
  c.fractions = {0.1, 0.3333333333333333};
  c.iterations = 2;
  c.seed_base = 9;
  c.ablation_init = Init::kPretrained;
  const RunConfig back = RunConfig::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.seed == c.seed);
  CHECK(back.fractions == c.fractions);
  CHECK(back.train.learning_rate == c.train.learning_rate);
  CHECK(back.features.fmax == c.features.fmax);
  CHECK(back.model == c.model);
  CHECK(back.seed_base == c.seed_base);
  CHECK(back.multiscale_sweep == c.multiscale_sweep);
}

TEST_CASE("run config rejects unknown or mistyped entries") {
  CHECK_THROWS_AS(RunConfig::from_text("[run]\nsede = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("[run]\nseed = \"seven\"\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("[model]\nfamily = \"vgg\"\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("[train]\nbatch_size = -4\n"), ConfigError);
  RunConfig c;
  c.set("train.batch_size=16");
  c.set("model.family=sbcnn");
  c.set("ablation.fractions=[0.5]");
  CHECK(c.train.batch_size == 16);
  CHECK(c.model.family == Family::kSbCnn);
  CHECK(c.fractions == std::vector<double>{0.5});
  CHECK_THROWS_AS(c.set("train.nope=1"), ConfigError);
  CHECK_THROWS_AS(c.set("no_equals"), ConfigError);
}

TEST_CASE("resolved config fills defaults and applies the desk profile") {
  RunConfig c;
  c.dataset = Task::kScLr2;
  c.seed = 11;
  c.profile = "desk";
  const RunConfig r = c.resolved();
  CHECK(r.profile == "full");
  CHECK(r.clip_seconds == 1.0);
  CHECK(r.seed_base == 11u);
  CHECK(r.model.preset == "tiny");
  CHECK(r.transfer.epochs == 5);
  CHECK(r.train.max_epochs == 25);
  CHECK(r.train.patience == 2);
  CHECK(r.resolved().to_text() == r.to_text());
  CHECK(RunConfig{}.resolved().clip_seconds == 4.0);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli({}).code == kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == kExitUsage);
  CHECK(run_cli({"train", "--no-such-flag"}).code == kExitUsage);
  CHECK(run_cli({"train", "--lr", "fast"}).code == kExitUsage);
  CHECK(run_cli({"train", "--config", "/nonexistent/run.toml"}).code == kExitUsage);
  const auto no_root = run_cli({"train", "--out", test::scratch_dir("cli_codes").string()});
  CHECK(no_root.code == kExitUsage);
  CHECK(no_root.err.find("root") != std::string::npos);
  const auto missing = run_cli({"train", "--root", "/nonexistent/us8k", "--out",
                                test::scratch_dir("cli_codes2").string()});
  CHECK(missing.code == kExitRuntime);
  CHECK(missing.err.find("dataset error") != std::string::npos);
  CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("featurize writes one cache file per clip") {
  const auto out = test::scratch_dir("cli_featurize");
  const auto r = run_cli({"featurize", "--dataset", "us8k", "--root", test::fixture("us8k").string(), "--out",
                          out.string(), "--name", "f", "--clip-seconds", "1.0"});
  REQUIRE(r.code == kExitOk);
  const Json manifest = read_json(out / "f" / "features_manifest.json");
  CHECK(manifest["entries"].size() == 20);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(out / "cache")) files += entry.path().extension() == ".melf";
  CHECK(files == 20);
  for (const auto& e : manifest["entries"]) CHECK(fs::exists(e["cache"].get<std::string>()));
  CHECK(fs::exists(out / "f" / "config.toml"));
}

TEST_CASE("train is reproducible from its written config") {
  const auto out = test::scratch_dir("cli_train");
  const std::vector<std::string> common = {"train", "--root", test::fixture("us8k").string(), "--out", out.string(),
                                           "--profile", "desk", "--clip-seconds", "1.0", "--batch-size", "8",
                                           "--seed", "7", "--folds", "1,2,3"};
  auto args = common;
  args.insert(args.end(), {"--name", "a"});
  REQUIRE(run_cli(args).code == kExitOk);
  args = common;
  args.insert(args.end(), {"--name", "b"});
  REQUIRE(run_cli(args).code == kExitOk);
  CHECK(timeless(out / "a" / "report.json") == timeless(out / "b" / "report.json"));
  CHECK(read_json(out / "a" / "report.json")["conditions"].size() == 3);
  CHECK(fs::exists(out / "a" / "model.spnw"));
  CHECK(fs::exists(out / "a" / "model.spnw.json"));

  const auto rerun = run_cli({"train", "--config", (out / "a" / "config.toml").string(), "--name", "c"});
  REQUIRE(rerun.code == kExitOk);
  CHECK(timeless(out / "c" / "report.json") == timeless(out / "a" / "report.json"));
  CHECK(without_name(read_text(out / "c" / "config.toml")) == without_name(read_text(out / "a" / "config.toml")));
}

TEST_CASE("ablate emits twenty runs with agreeing CSV and JSON") {
  const auto out = test::scratch_dir("cli_ablate");
  const auto r = run_cli({"ablate", "--dataset", "sc_lr2", "--root", test::fixture("speech_commands").string(),
                          "--out", out.string(), "--name", "ab", "--profile", "desk", "--epochs", "2",
                          "--fractions", "0.25,0.5,0.75,1.0", "--iterations", "5", "--jobs", "2"});
  REQUIRE(r.code == kExitOk);
  const Json report = read_json(out / "ab" / "report.json");
  REQUIRE(report["conditions"].size() == 20);
  const auto csv = lines(read_text(out / "ab" / "report.csv"));
  REQUIRE(csv.size() == 21);
  CHECK(csv[0] == "condition,fraction,iteration,test_acc");
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& c = report["conditions"][i];
    const auto row = csv[i + 1];
    const double acc = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(acc == c["test_acc"].get<double>());
    CHECK(row.starts_with("\"" + c["condition"].get<std::string>() + "\","));
  }
  CHECK(report["config"]["ablation"]["iterations"] == 5);

  const auto again = run_cli({"report", "--input", (out / "ab" / "report.json").string(), "--out", out.string(),
                              "--name", "re"});
  REQUIRE(again.code == kExitOk);
  CHECK(read_text(out / "re" / "report.csv") == read_text(out / "ab" / "report.csv"));
  CHECK(read_json(out / "re" / "report.json") == report);
}

TEST_CASE("empty reports are rejected") {
  const auto out = test::scratch_dir("cli_report");
  Report empty;
  empty.experiment = "ablation";
  CHECK_THROWS_AS(emit_report(empty, out), ReportError);
  CHECK_FALSE(fs::exists(out / "report.json"));
  write_file_atomic(out / "empty.json", std::string(R"({"experiment":"ablation","config":{},"seed":0,)"
                                                    R"("class_names":[],"conditions":[],"summary":{}})"));
  const auto r = run_cli({"report", "--input", (out / "empty.json").string(), "--out", out.string()});
  CHECK(r.code == kExitRuntime);
  CHECK(run_cli({"report", "--input", (out / "missing.json").string()}).code == kExitUsage);
  CHECK(run_cli({"report"}).code == kExitUsage);

  Report bad;
  bad.experiment = "crossval";
  bad.conditions.push_back(ConditionResult{});
  bad.conditions.back().test_acc = 1.5;
  CHECK_THROWS_AS(bad.validate(), ReportError);
}

TEST_CASE("csv rows follow the conditions") {
  Report r;
  r.experiment = "ablation";
  for (int i = 0; i < 3; ++i) {
    ConditionResult c;
    c.condition = "init=fresh,task=sc_lr2";
    c.fraction = 0.25 * (i + 1);
    c.iteration = std::size_t(i);
    c.test_acc = 0.1 * (i + 1);
    r.conditions.push_back(c);
  }
  const auto csv = lines(report_to_csv(r));
  REQUIRE(csv.size() == 4);
  CHECK(csv[1] == "\"init=fresh,task=sc_lr2\",0.25,0,0.1");
  CHECK(csv[3] == "\"init=fresh,task=sc_lr2\",0.75,2,0.30000000000000004");
  CHECK(format_double(1.0) == "1");
  const Report back = report_from_json(report_to_json(r));
  CHECK(report_to_csv(back) == report_to_csv(r));
}
