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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <stdlib.h>

#include "json.hpp"
#include "oracles.hpp"
#include "protocil/error.hpp"
#include "protocil/harness.hpp"
#include "test_util.hpp"

namespace protocil {
namespace {

// Knows the ground truth: recovers the sample index from the span address and
// answers with the slot the harness assigned to that sample's class.
class PerfectLearner final : public Learner {
 public:
  explicit PerfectLearner(const FeatureSet& fs) : fs_(fs) {}
  std::string name() const override { return "perfect"; }
  void learn_phase(const SampleView& data, std::size_t) override {
    for (std::size_t k = 0; k < data.size(); ++k) slot_[fs_.label(data.rows()[k])] = data.label(k);
  }
  ClassId predict(std::span<const double> z) const override {
    const auto row = static_cast<std::size_t>(z.data() - fs_.features().data().data()) / fs_.dim();
    return slot_.at(fs_.label(row));
  }

 private:
  const FeatureSet& fs_;
  std::map<ClassId, ClassId> slot_;
};

class ConstantLearner final : public Learner {
 public:
  std::string name() const override { return "constant"; }
  void learn_phase(const SampleView&, std::size_t) override {}
  ClassId predict(std::span<const double>) const override { return 0; }
};

FeatureSet small_set(std::size_t classes = 6, std::size_t per_class = 20, std::uint64_t seed = 4) {
  return generate_synthetic({.class_count = classes, .dim = 8, .samples_per_class = per_class,
                             .mean_scale = 6.0, .within_std = 1.0, .seed = seed});
}

MethodConfig quick_method() {
  MethodConfig mc;
  mc.train.epochs = 8;
  mc.train.batch_size = 32;
  return mc;
}

TEST(Herding, MatchesBruteForceGreedy) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix f(40, 5);
    for (double& v : f.data()) v = normal(rng);
    std::vector<std::size_t> rows;
    for (std::size_t i = trial % 3; i < 40; i += 2) rows.push_back(i);
    const std::size_t budget = 1 + trial;
    EXPECT_EQ(herding_select(f, rows, budget), testing::brute_force_herding(f, rows, budget));
  }
}

TEST(Herding, BudgetBeyondClassSizeTakesEverySampleOnce) {
  Matrix f(4, 1);
  for (std::size_t i = 0; i < 4; ++i) f(i, 0) = static_cast<double>(i);
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  auto sel = herding_select(f, rows, 10);
  ASSERT_EQ(sel.size(), 4u);
  // Mean is 1.5; 1 and 2 tie for the first pick and the lower index wins.
  EXPECT_EQ(sel[0], 1u);
  std::sort(sel.begin(), sel.end());
  EXPECT_EQ(sel, rows);
  EXPECT_THROW(herding_select(f, rows, 0), ConfigError);
}

TEST(SplitTrainEval, StratifiedDisjointAndSeeded) {
  const FeatureSet fs = generate_synthetic({.class_count = 3, .dim = 2, .samples_per_class = 11});
  const TrainEvalSplit s = split_train_eval(fs, 0.2, 5);
  EXPECT_EQ(s.eval.size(), 3u * 2u);  // round(2.2) per class
  EXPECT_EQ(s.train.size() + s.eval.size(), fs.size());
  for (std::size_t i : s.eval) EXPECT_TRUE(s.is_eval[i]);
  for (std::size_t i : s.train) EXPECT_FALSE(s.is_eval[i]);
  EXPECT_EQ(split_train_eval(fs, 0.2, 5).eval, s.eval);
  EXPECT_NE(split_train_eval(fs, 0.2, 6).eval, s.eval);

  // Clamped so both sides keep a sample.
  const FeatureSet two = generate_synthetic({.class_count = 2, .dim = 2, .samples_per_class = 2});
  EXPECT_EQ(split_train_eval(two, 0.01, 0).eval.size(), 2u);
  EXPECT_EQ(split_train_eval(two, 0.99, 0).eval.size(), 2u);

  Matrix one(3, 1);
  one(1, 0) = 1.0;
  EXPECT_THROW(split_train_eval(FeatureSet(one, {0, 1, 1}), 0.2, 0), DataError);
}

TEST(RunCil, PerfectLearnerScoresOneEverywhere) {
  const FeatureSet fs = small_set();
  const TaskStream stream = split_tasks(fs, 3, 0.5, 0, 9);
  PerfectLearner learner(fs);
  const RunReport r = run_cil(fs, stream, learner, {});
  ASSERT_EQ(r.phases.size(), 4u);
  for (const auto& p : r.phases) {
    EXPECT_EQ(p.accuracy, 1.0);
    EXPECT_EQ(p.new_accuracy, 1.0);
  }
  EXPECT_FALSE(r.phases[0].old_accuracy.has_value());
  EXPECT_EQ(r.phases[1].old_accuracy, 1.0);
  EXPECT_EQ(r.average_accuracy, 1.0);
}

TEST(RunCil, AverageIncludesBasePhase) {
  // Two single-class phases with equal eval counts; always answering slot 0 is
  // right on all of phase 0 and on half of phase 1.
  const FeatureSet fs = small_set(2, 10);
  const TaskStream stream = split_tasks(fs, 1, 0.5, 0);
  ConstantLearner learner;
  const RunReport r = run_cil(fs, stream, learner, {});
  ASSERT_EQ(r.phases.size(), 2u);
  EXPECT_EQ(r.phases[0].accuracy, 1.0);
  EXPECT_EQ(r.phases[1].accuracy, 0.5);
  EXPECT_EQ(r.average_accuracy, 0.75);
}

TEST(RunCil, AverageIsTheMeanOfPhaseAccuracies) {
  const FeatureSet fs = small_set(8, 15, 2);
  const TaskStream stream = split_tasks(fs, 4, 0.5, 0);
  for (Method m : {Method::kIpc, Method::kLinear, Method::kCosine, Method::kNme}) {
    auto learner = make_learner(m, fs.dim(), quick_method());
    const RunReport r = run_cil(fs, stream, *learner, {});
    double sum = 0.0;
    for (const auto& p : r.phases) sum += p.accuracy;
    EXPECT_DOUBLE_EQ(r.average_accuracy, sum / static_cast<double>(r.phases.size()));
    EXPECT_EQ(r.method, to_string(m));
  }
}

TEST(RunCil, EvaluationNeverTouchesTrainingSamplesAndMemoryFollowsReplay) {
  const FeatureSet fs = small_set(6, 20);
  const TaskStream stream = split_tasks(fs, 3, 0.5, 0);
  const TrainEvalSplit split = split_train_eval(fs, 0.2, 3);
  for (std::size_t replay : {0u, 3u, 100u}) {
    auto learner = make_learner(Method::kNme, fs.dim(), quick_method());
    RunOptions opt;
    opt.seed = 3;
    opt.memory_per_class = replay;
    std::set<ClassId> learned;
    run_cil(fs, stream, *learner, opt, {}, [&](const PhaseSnapshot& snap) {
      const std::set<std::size_t> eval(snap.eval_samples->begin(), snap.eval_samples->end());
      for (std::size_t row : snap.train_data->rows) {
        EXPECT_FALSE(eval.contains(row));
        EXPECT_FALSE(split.is_eval[row]);
      }
      for (ClassId c : stream.phases[snap.t].classes) learned.insert(c);
      if (replay == 0) {
        EXPECT_TRUE(snap.memory->empty());
        return;
      }
      EXPECT_EQ(snap.memory->size(), learned.size());
      for (const auto& [c, rows] : *snap.memory) {
        EXPECT_EQ(rows.size(), std::min<std::size_t>(replay, 16));  // 16 train samples per class
        for (std::size_t row : rows) EXPECT_EQ(fs.label(row), c);
      }
    });
  }
}

TEST(RunCil, FrozenPrototypesStayConstantAcrossPhases) {
  const FeatureSet fs = small_set(8, 15, 6);
  const TaskStream stream = split_tasks(fs, 3, 0.25, 2);
  IpcLearner learner(fs.dim(), quick_method());
  Matrix previous;
  RunOptions opt;
  opt.memory_per_class = 2;
  run_cil(fs, stream, learner, opt, {}, [&](const PhaseSnapshot& snap) {
    const Matrix& now = static_cast<const IpcLearner*>(snap.learner)->classifier().prototypes();
    for (std::size_t i = 0; i < previous.rows(); ++i) {
      EXPECT_TRUE(std::ranges::equal(previous.row(i), now.row(i))) << "phase " << snap.t;
    }
    previous = now;
  });
}

TEST(RunCil, RejectsStreamForDifferentFeatures) {
  const FeatureSet fs = small_set(4, 10);
  const TaskStream stream = split_tasks(small_set(6, 10), 1, 0.5, 0);
  ConstantLearner learner;
  EXPECT_THROW(run_cil(fs, stream, learner, {}), DataError);
}

TEST(Report, JsonRoundTripAndSchema) {
  const FeatureSet fs = small_set();
  const TaskStream stream = split_tasks(fs, 3, 0.5, 0);
  auto learner = make_learner(Method::kIpc, fs.dim(), quick_method());
  const RunReport r = run_cil(fs, stream, *learner, {}, {{"note", std::string("x")}});
  const std::string text = report_to_json(r);
  EXPECT_EQ(report_to_json(report_from_json(text)), text);

  const auto j = nlohmann::json::parse(text);
  for (const char* key : {"method", "config_echo", "seed", "phases", "average_accuracy"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const char* key : {"t", "classes", "A_t", "old_acc", "new_acc"}) {
    EXPECT_TRUE(j["phases"][0].contains(key)) << key;
  }
  EXPECT_TRUE(j["phases"][0]["old_acc"].is_null());
  EXPECT_EQ(j["tool_version"], std::string(version()));
  const auto& echo = j["config_echo"];
  for (const char* key : {"method", "phases", "replay", "gamma", "lambda", "epochs", "lr",
                          "momentum", "batch", "seed", "eval_fraction", "note"}) {
    EXPECT_TRUE(echo.contains(key)) << key;
  }
  EXPECT_THROW(report_from_json("{\"method\": 3}"), DataError);
}

TEST(Report, CsvHasOneRowPerRun) {
  const FeatureSet fs = small_set();
  const TaskStream stream = split_tasks(fs, 3, 0.5, 0);
  std::vector<RunReport> reports;
  for (Method m : {Method::kIpc, Method::kNme}) {
    auto learner = make_learner(m, fs.dim(), quick_method());
    reports.push_back(run_cil(fs, stream, *learner, {}));
  }
  const std::string csv = reports_to_csv(reports);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,phases,replay,gamma,lambda,seed,average_accuracy,final_accuracy,A_0,A_1,A_2,A_3");
}

TEST(RunCil, IdenticalConfigGivesIdenticalReportBytes) {
  const FeatureSet fs = small_set();
  const TaskStream stream = split_tasks(fs, 3, 0.5, 2);
  RunOptions opt;
  opt.memory_per_class = 2;
  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    for (Method m : {Method::kIpc, Method::kLinear}) {
      auto learner = make_learner(m, fs.dim(), quick_method());
      const std::string text = report_to_json(run_cil(fs, stream, *learner, opt));
      if (m == Method::kIpc) {
        if (rep == 0) first = text;
        else EXPECT_EQ(text, first);
      }
    }
  }
}

TEST(RunCil, ReportDoesNotDependOnThreadCount) {
  const FeatureSet fs = generate_synthetic({.class_count = 6, .dim = 8, .samples_per_class = 800,
                                            .mean_scale = 3.0, .seed = 12});
  const TaskStream stream = split_tasks(fs, 3, 0.5, 0);
  std::vector<std::string> texts;
  for (const char* threads : {"1", "4"}) {
    ::setenv("PROTOCIL_THREADS", threads, 1);
    auto learner = make_learner(Method::kNme, fs.dim(), quick_method());
    texts.push_back(report_to_json(run_cil(fs, stream, *learner, {})));
  }
  ::unsetenv("PROTOCIL_THREADS");
  EXPECT_EQ(texts[0], texts[1]);
}

}  // namespace
}  // namespace protocil
