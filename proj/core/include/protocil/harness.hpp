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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "protocil/baselines.hpp"
#include "protocil/featureset.hpp"
#include "protocil/ipc.hpp"
#include "protocil/optim.hpp"
#include "protocil/samples.hpp"
#include "protocil/task_stream.hpp"

namespace protocil {

std::string_view version();

using ConfigValue = std::variant<bool, std::int64_t, double, std::string>;
using ConfigEcho = std::vector<std::pair<std::string, ConfigValue>>;

// Greedy mean matching: repeatedly adds the sample that keeps the mean of the
// selection closest to the class mean. Returns min(budget, n) indices taken
// from `class_rows`, in selection order; ties go to the lowest index.
std::vector<std::size_t> herding_select(const Matrix& features,
                                        std::span<const std::size_t> class_rows,
                                        std::size_t budget);

// A classifier the harness can drive through a task stream. Class labels are
// slot ids assigned in order of arrival.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  // `data` holds the phase's training samples plus any replayed exemplars;
  // the new classes are slots [learned, learned + new_class_count).
  virtual void learn_phase(const SampleView& data, std::size_t new_class_count) = 0;
  virtual ClassId predict(std::span<const double> z) const = 0;
  virtual ConfigEcho describe() const { return {}; }
};

enum class Method { kIpc, kLinear, kCosine, kNme };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct MethodConfig {
  double gamma = kDefaultGamma;
  double lambda = kDefaultLambda;
  TrainConfig train;
  Objective objective = Objective::kHybrid;
};

class IpcLearner final : public Learner {
 public:
  IpcLearner(std::size_t dim, const MethodConfig& config);
  std::string name() const override { return "ipc"; }
  void learn_phase(const SampleView& data, std::size_t new_class_count) override;
  ClassId predict(std::span<const double> z) const override;
  ConfigEcho describe() const override;
  const PrototypeClassifier& classifier() const noexcept { return clf_; }

 private:
  MethodConfig config_;
  PrototypeClassifier clf_;
  std::size_t phase_ = 0;
};

class LinearLearner final : public Learner {
 public:
  LinearLearner(std::size_t dim, bool cosine, const MethodConfig& config);
  std::string name() const override { return head_.normalized() ? "cosine" : "linear"; }
  void learn_phase(const SampleView& data, std::size_t new_class_count) override;
  ClassId predict(std::span<const double> z) const override;
  ConfigEcho describe() const override;
  const LinearHead& head() const noexcept { return head_; }

 private:
  MethodConfig config_;
  LinearHead head_;
  std::size_t phase_ = 0;
};

// Means of old classes are refit whenever the phase data carries exemplars of
// them and kept as-is otherwise (no replay).
class NmeLearner final : public Learner {
 public:
  explicit NmeLearner(std::size_t dim);
  std::string name() const override { return "nme"; }
  void learn_phase(const SampleView& data, std::size_t new_class_count) override;
  ClassId predict(std::span<const double> z) const override;
  const NmeHead& head() const noexcept { return head_; }

 private:
  NmeHead head_;
};

std::unique_ptr<Learner> make_learner(Method method, std::size_t dim, const MethodConfig& config);

struct RunOptions {
  double eval_fraction = 0.2;
  std::uint64_t seed = 0;            // eval split
  std::size_t memory_per_class = 0;  // exemplars kept per old class (R)
};

struct TrainEvalSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> eval;   // ascending
  std::vector<bool> is_eval;       // per FeatureSet sample
};

// Stratified per class: round(fraction * n) samples of each class go to eval,
// clamped so both sides keep at least one. Classes with one sample are an
// error.
TrainEvalSplit split_train_eval(const FeatureSet& fs, double eval_fraction, std::uint64_t seed);

struct ClassAccuracy {
  std::int64_t class_id = 0;  // original id from the FeatureSet
  double accuracy = 0.0;
  std::size_t eval_count = 0;
};

struct PhaseResult {
  std::size_t t = 0;
  std::vector<std::int64_t> classes;  // original ids learned in this phase
  double accuracy = 0.0;              // pooled over every seen class
  std::optional<double> old_accuracy; // classes from earlier phases (none in phase 0)
  double new_accuracy = 0.0;          // classes of this phase
  std::size_t eval_count = 0;
  std::vector<ClassAccuracy> per_class;
};

struct RunReport {
  std::string method;
  std::string tool_version;
  ConfigEcho config_echo;
  std::uint64_t seed = 0;
  std::vector<PhaseResult> phases;
  double average_accuracy = 0.0;
};

// What the harness did in one phase, for observers (tests, logging).
struct PhaseSnapshot {
  std::size_t t = 0;
  const LabeledRows* train_data = nullptr;            // what the learner saw
  const std::vector<std::size_t>* eval_samples = nullptr;
  const std::map<ClassId, std::vector<std::size_t>>* memory = nullptr;  // after update
  const Learner* learner = nullptr;
};

using PhaseObserver = std::function<void(const PhaseSnapshot&)>;

// Replays the stream: per phase, train on D_t plus replayed exemplars, then
// score every eval sample of every class seen so far. Exemplar memory is
// refreshed by herding after each phase when memory_per_class > 0.
// `extra_echo` is appended to the report's config echo.
RunReport run_cil(const FeatureSet& fs, const TaskStream& stream, Learner& learner,
                  const RunOptions& options, const ConfigEcho& extra_echo = {},
                  const PhaseObserver& observer = {});

std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);

void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

// One CSV row per report: method, phases, replay, gamma, lambda, seed,
// average_accuracy, final_accuracy, plus one column per phase accuracy.
std::string reports_to_csv(const std::vector<RunReport>& reports);

}  // namespace protocil
