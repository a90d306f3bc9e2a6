// Copyright 2026 The protocil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "protocil/featureset.hpp"
#include "protocil/ipc.hpp"
#include "test_util.hpp"

namespace protocil {
namespace {

using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

// Writes a small synthetic set and a three-phase stream into `dir`.
void make_inputs(const TempDir& dir) {
  ASSERT_EQ(cli({"gen-synth", "--classes", "6", "--dim", "8", "--per-class", "15", "--mean-scale",
                 "5", "--seed", "2", "--out", p(dir / "f.fset")})
                .code,
            0);
  ASSERT_EQ(cli({"split", "--input", p(dir / "f.fset"), "--phases", "3", "--base-fraction", "1/2",
                 "--out", p(dir / "s.json")})
                .code,
            0);
}

TEST(Cli, GenSynthWritesALoadableFile) {
  TempDir dir;
  const Result r = cli({"gen-synth", "--classes", "4", "--dim", "8", "--per-class", "10", "--seed",
                        "1", "--out", p(dir / "f.fset")});
  EXPECT_EQ(r.code, 0) << r.err;
  const FeatureSet fs = load_featureset(dir / "f.fset");
  EXPECT_EQ(fs.size(), 40u);
  EXPECT_EQ(fs.dim(), 8u);
  EXPECT_EQ(fs.class_count(), 4u);

  EXPECT_EQ(cli({"gen-synth", "--classes", "4", "--dim", "8", "--per-class", "10", "--seed", "1",
                 "--out", p(dir / "f.csv")})
                .code,
            0);
  EXPECT_EQ(load_featureset(dir / "f.csv").features(), fs.features());
}

TEST(Cli, NegativeLambdaIsAUsageErrorNamingTheConstraint) {
  TempDir dir;
  make_inputs(dir);
  const Result r = cli({"run", "--features", p(dir / "f.fset"), "--stream", p(dir / "s.json"),
                        "--method", "ipc", "--lambda", "-1", "--report", p(dir / "r.json")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("lambda >= 0"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "r.json"));
}

TEST(Cli, ErrorsAreSingleLineWithCategoryAndExitCode) {
  TempDir dir;
  const std::regex line(R"(protocil: error\[[a-z/-]+\]: [^\n]*\n)");

  Result r = cli({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_TRUE(std::regex_match(r.err, line)) << r.err;

  r = cli({"gen-synth", "--out", p(dir / "x"), "--bogus", "1"});
  EXPECT_EQ(r.code, cli::kExitUsage);

  r = cli({"gen-synth", "--classes", "many", "--out", p(dir / "x")});
  EXPECT_EQ(r.code, cli::kExitUsage);

  r = cli({"split", "--input", p(dir / "missing.fset"), "--out", p(dir / "s.json")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_TRUE(std::regex_match(r.err, line)) << r.err;
  EXPECT_NE(r.err.find("error[data/io]"), std::string::npos) << r.err;

  testing::write_file(dir / "bad.fset", "FSET\x02");
  r = cli({"diagnose", "--features", p(dir / "bad.fset"), "--out-prefix", p(dir / "d")});
  EXPECT_EQ(r.code, cli::kExitData);
}

TEST(Cli, DivergentTrainingIsANumericError) {
  TempDir dir;
  make_inputs(dir);
  const Result r = cli({"train", "--features", p(dir / "f.fset"), "--stream", p(dir / "s.json"),
                        "--lr", "10", "--lambda", "5", "--momentum", "0", "--lr-schedule",
                        "constant", "--epochs", "200", "--checkpoint-out", p(dir / "m.ipc"),
                        "--report-out", p(dir / "r.json")});
  EXPECT_EQ(r.code, cli::kExitNumeric) << r.err;
  EXPECT_NE(r.err.find("error[numeric]"), std::string::npos) << r.err;
}

TEST(Cli, FullPipelineProducesOneCsvRowPerRun) {
  TempDir dir;
  make_inputs(dir);
  std::vector<std::string> reports;
  for (const std::string method : {"ipc", "linear", "cosine", "nme"}) {
    const std::string out = p(dir / (method + ".json"));
    const Result r = cli({"run", "--features", p(dir / "f.fset"), "--stream", p(dir / "s.json"),
                          "--method", method, "--epochs", "5", "--report", out});
    ASSERT_EQ(r.code, 0) << r.err;
    reports.push_back(out);
  }
  std::vector<std::string> args{"report", "--out", p(dir / "table.csv"), "--inputs"};
  args.insert(args.end(), reports.begin(), reports.end());
  const Result r = cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::read_file(dir / "table.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.rfind("method,phases,replay,", 0), 0u);
}

TEST(Cli, TrainWritesCheckpointAndReport) {
  TempDir dir;
  make_inputs(dir);
  const Result r = cli({"train", "--features", p(dir / "f.fset"), "--stream", p(dir / "s.json"),
                        "--epochs", "4", "--gamma", "0.5", "--checkpoint-out", p(dir / "m.ipc"),
                        "--report-out", p(dir / "r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const PrototypeClassifier clf = load_checkpoint(dir / "m.ipc");
  EXPECT_EQ(clf.class_count(), 6u);
  EXPECT_EQ(clf.frozen_count(), 6u);
  EXPECT_EQ(clf.gamma(), 0.5);
  const auto j = nlohmann::json::parse(testing::read_file(dir / "r.json"));
  EXPECT_EQ(j["method"], "ipc");
  EXPECT_EQ(j["phases"].size(), 4u);
}

TEST(Cli, BaselineKinds) {
  TempDir dir;
  make_inputs(dir);
  for (const std::string kind : {"linear", "cosine", "nme"}) {
    const Result r = cli({"baseline", "--kind", kind, "--features", p(dir / "f.fset"), "--stream",
                          p(dir / "s.json"), "--epochs", "3", "--replay", "2", "--report-out",
                          p(dir / "b.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(testing::read_file(dir / "b.json"));
    EXPECT_EQ(j["method"], kind);
    EXPECT_EQ(j["config_echo"]["replay"], 2);
  }
  EXPECT_EQ(cli({"baseline", "--kind", "svm", "--features", p(dir / "f.fset"), "--stream",
                 p(dir / "s.json"), "--report-out", p(dir / "b.json")})
                .code,
            cli::kExitUsage);
}

TEST(Cli, ReportsAreByteIdenticalForIdenticalConfigs) {
  TempDir dir;
  make_inputs(dir);
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(cli({"run", "--features", p(dir / "f.fset"), "--stream", p(dir / "s.json"),
                   "--method", "ipc", "--epochs", "6", "--replay", "2", "--seed", "4", "--report",
                   p(dir / name)})
                  .code,
              0);
  }
  EXPECT_EQ(testing::read_file(dir / "a.json"), testing::read_file(dir / "b.json"));
}

TEST(Cli, ConfigFileValuesApplyAndFlagsWin) {
  TempDir dir;
  make_inputs(dir);
  testing::write_file(dir / "run.cfg",
                      "# experiment\nmethod = ipc\nlambda=0.7\nepochs=3\ngamma=2\nl2-normalize=true\n");
  Result r = cli({"run", "--config", p(dir / "run.cfg"), "--features", p(dir / "f.fset"),
                  "--stream", p(dir / "s.json"), "--gamma", "0.25", "--report", p(dir / "r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto echo = nlohmann::json::parse(testing::read_file(dir / "r.json"))["config_echo"];
  EXPECT_EQ(echo["lambda"], 0.7);
  EXPECT_EQ(echo["epochs"], 3);
  EXPECT_EQ(echo["gamma"], 0.25);
  EXPECT_EQ(echo["l2_normalize"], true);

  testing::write_file(dir / "bad.cfg", "lambda=0.7\nlamda=0.3\n");
  r = cli({"run", "--config", p(dir / "bad.cfg"), "--features", p(dir / "f.fset"), "--stream",
           p(dir / "s.json"), "--method", "ipc", "--report", p(dir / "r.json")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("unknown key 'lamda'"), std::string::npos) << r.err;
}

double help_default(const std::string& help, const std::string& flag) {
  const std::regex re(flag + R"( [A-Z]+(?::\{[^}]*\})? \[([^\]]+)\])");
  std::smatch m;
  if (!std::regex_search(help, m, re)) {
    ADD_FAILURE() << flag << " has no default in help:\n" << help;
    return -1.0;
  }
  return std::stod(m[1]);
}

TEST(Cli, HelpListsTheDocumentedDefaults) {
  const Result run = cli({"run", "--help"});
  EXPECT_EQ(run.code, 0);
  EXPECT_EQ(help_default(run.out, "--gamma"), 1.0);
  EXPECT_EQ(help_default(run.out, "--lambda"), 0.3);
  EXPECT_EQ(help_default(run.out, "--lr"), 0.1);
  EXPECT_EQ(help_default(run.out, "--momentum"), 0.9);
  EXPECT_EQ(help_default(run.out, "--batch"), 128.0);
  EXPECT_EQ(help_default(run.out, "--epochs"), 160.0);
  const Result split = cli({"split", "--help"});
  EXPECT_EQ(help_default(split.out, "--base-fraction"), 0.5);
  for (const std::string sub : {"gen-synth", "split", "train", "baseline", "diagnose", "run",
                                "report"}) {
    const Result top = cli({"--help"});
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, DiagnoseWritesSpectrumPcIdAndCosineFiles) {
  TempDir dir;
  make_inputs(dir);
  const Result r = cli({"diagnose", "--features", p(dir / "f.fset"), "--normalize", "off",
                        "--max-per-class", "5", "--out-prefix", p(dir / "d")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(testing::read_file(dir / "d.pcid.json"));
  EXPECT_GE(j["pc_id"].get<int>(), 1);
  EXPECT_LE(j["pc_id"].get<int>(), 8);
  EXPECT_EQ(j["normalize"], false);
  const std::string spectrum = testing::read_file(dir / "d.spectrum.csv");
  EXPECT_EQ(std::count(spectrum.begin(), spectrum.end(), '\n'), 9);
  const std::string cosine = testing::read_file(dir / "d.cosine.csv");
  EXPECT_EQ(cosine.rfind("class_boundaries,0:0:5,1:5:10", 0), 0u);
  EXPECT_EQ(std::count(cosine.begin(), cosine.end(), '\n'), 31);
}

}  // namespace
}  // namespace protocil
