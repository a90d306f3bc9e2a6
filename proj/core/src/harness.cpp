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

#include "protocil/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

#include "protocil/error.hpp"
#include "protocil/parallel.hpp"

namespace protocil {

#ifndef PROTOCIL_VERSION_STRING
#define PROTOCIL_VERSION_STRING "0.0.0"
#endif

std::string_view version() { return PROTOCIL_VERSION_STRING; }

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kIpc:
      return "ipc";
    case Method::kLinear:
      return "linear";
    case Method::kCosine:
      return "cosine";
    case Method::kNme:
      return "nme";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "ipc") return Method::kIpc;
  if (text == "linear") return Method::kLinear;
  if (text == "cosine") return Method::kCosine;
  if (text == "nme") return Method::kNme;
  throw ConfigError("method must be one of ipc|linear|cosine|nme, got '" + std::string(text) + "'");
}

namespace {

TrainConfig phase_config(const TrainConfig& base, std::size_t phase) {
  TrainConfig cfg = base;
  cfg.seed = base.seed + phase;
  return cfg;
}

void echo_train(ConfigEcho& echo, const TrainConfig& cfg) {
  echo.emplace_back("epochs", static_cast<std::int64_t>(cfg.epochs));
  echo.emplace_back("batch", static_cast<std::int64_t>(cfg.batch_size));
  echo.emplace_back("lr", cfg.learning_rate);
  echo.emplace_back("momentum", cfg.momentum);
  echo.emplace_back("lr_schedule", std::string(to_string(cfg.lr_schedule)));
  echo.emplace_back("train_seed", static_cast<std::int64_t>(cfg.seed));
}

}  // namespace

IpcLearner::IpcLearner(std::size_t dim, const MethodConfig& config)
    : config_(config), clf_(dim, config.gamma, config.lambda) {
  config_.train.validate();
}

void IpcLearner::learn_phase(const SampleView& data, std::size_t new_class_count) {
  std::vector<ClassId> fresh(new_class_count);
  std::iota(fresh.begin(), fresh.end(), static_cast<ClassId>(clf_.class_count()));
  clf_ = train_phase(std::move(clf_), data, fresh, phase_config(config_.train, phase_++),
                     config_.objective);
}

ClassId IpcLearner::predict(std::span<const double> z) const { return protocil::predict(clf_, z); }

ConfigEcho IpcLearner::describe() const {
  ConfigEcho echo;
  echo.emplace_back("gamma", config_.gamma);
  echo.emplace_back("lambda", config_.lambda);
  echo.emplace_back("objective",
                    std::string(config_.objective == Objective::kHybrid ? "hybrid" : "prototype-only"));
  echo_train(echo, config_.train);
  return echo;
}

LinearLearner::LinearLearner(std::size_t dim, bool cosine, const MethodConfig& config)
    : config_(config), head_(dim, cosine) {
  config_.train.validate();
}

void LinearLearner::learn_phase(const SampleView& data, std::size_t new_class_count) {
  const TrainConfig cfg = phase_config(config_.train, phase_++);
  head_.grow(new_class_count, cfg.seed);
  head_ = train_linear(std::move(head_), data, cfg);
}

ClassId LinearLearner::predict(std::span<const double> z) const { return predict_linear(head_, z); }

ConfigEcho LinearLearner::describe() const {
  ConfigEcho echo;
  echo_train(echo, config_.train);
  return echo;
}

NmeLearner::NmeLearner(std::size_t dim) : head_{Matrix(0, dim), {}} {}

void NmeLearner::learn_phase(const SampleView& data, std::size_t new_class_count) {
  const std::size_t old_count = head_.class_count();
  const std::size_t total = old_count + new_class_count;

  // Refit every class present in the data; relabel them contiguously so
  // fit_nme sees no empty class.
  std::vector<ClassId> present_slot(total, static_cast<ClassId>(-1));
  std::vector<ClassId> present_classes;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const ClassId y = data.label(k);
    if (y >= total) {
      throw ConfigError("label " + std::to_string(y) + " is out of range for " +
                        std::to_string(total) + " classes");
    }
    if (present_slot[y] == static_cast<ClassId>(-1)) {
      present_slot[y] = static_cast<ClassId>(present_classes.size());
      present_classes.push_back(y);
    }
  }
  for (std::size_t c = old_count; c < total; ++c) {
    if (present_slot[c] == static_cast<ClassId>(-1)) {
      throw DataError("new class " + std::to_string(c) + " has no samples to compute a mean from");
    }
  }
  std::vector<ClassId> relabeled(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) relabeled[k] = present_slot[data.label(k)];
  const NmeHead fitted =
      fit_nme(SampleView(data.features(), data.rows(), relabeled), present_classes.size());

  head_.class_means.append_rows(new_class_count);
  head_.counts.resize(total, 0);
  for (std::size_t p = 0; p < present_classes.size(); ++p) {
    const ClassId c = present_classes[p];
    const auto src = fitted.class_means.row(p);
    std::copy(src.begin(), src.end(), head_.class_means.row(c).begin());
    head_.counts[c] = fitted.counts[p];
  }
}

ClassId NmeLearner::predict(std::span<const double> z) const { return predict_nme(head_, z); }

std::unique_ptr<Learner> make_learner(Method method, std::size_t dim, const MethodConfig& config) {
  switch (method) {
    case Method::kIpc:
      return std::make_unique<IpcLearner>(dim, config);
    case Method::kLinear:
      return std::make_unique<LinearLearner>(dim, false, config);
    case Method::kCosine:
      return std::make_unique<LinearLearner>(dim, true, config);
    case Method::kNme:
      return std::make_unique<NmeLearner>(dim);
  }
  throw ConfigError("unknown method");
}

TrainEvalSplit split_train_eval(const FeatureSet& fs, double eval_fraction, std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw ConfigError("eval fraction must lie in (0, 1), got " + std::to_string(eval_fraction));
  }
  TrainEvalSplit split;
  split.is_eval.assign(fs.size(), false);
  const auto groups = fs.indices_by_class();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::vector<std::size_t> members = groups[c];
    const std::size_t n = members.size();
    if (n < 2) {
      throw DataError("class " + std::to_string(fs.original_ids()[c]) +
                      " has a single sample; it cannot be split into train and eval");
    }
    auto eval_n = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(n)));
    eval_n = std::clamp<std::size_t>(eval_n, 1, n - 1);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), 0x5eedU};
    std::mt19937_64 rng(seq);
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < eval_n; ++k) split.is_eval[members[k]] = true;
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    (split.is_eval[i] ? split.eval : split.train).push_back(i);
  }
  return split;
}

RunReport run_cil(const FeatureSet& fs, const TaskStream& stream, Learner& learner,
                  const RunOptions& options, const ConfigEcho& extra_echo,
                  const PhaseObserver& observer) {
  stream.validate(fs);
  const TrainEvalSplit split = split_train_eval(fs, options.eval_fraction, options.seed);

  RunReport report;
  report.method = learner.name();
  report.tool_version = std::string(version());
  report.seed = options.seed;
  report.config_echo.emplace_back("method", report.method);
  report.config_echo.emplace_back("classes", static_cast<std::int64_t>(fs.class_count()));
  report.config_echo.emplace_back("phases", static_cast<std::int64_t>(stream.incremental_phases()));
  report.config_echo.emplace_back("base_fraction", stream.base_fraction);
  report.config_echo.emplace_back("replay", static_cast<std::int64_t>(options.memory_per_class));
  report.config_echo.emplace_back("eval_fraction", options.eval_fraction);
  report.config_echo.emplace_back("seed", static_cast<std::int64_t>(options.seed));
  for (auto& entry : learner.describe()) report.config_echo.push_back(std::move(entry));
  for (const auto& entry : extra_echo) report.config_echo.push_back(entry);

  constexpr ClassId kUnseen = static_cast<ClassId>(-1);
  std::vector<ClassId> slot_of_class(fs.class_count(), kUnseen);
  std::vector<ClassId> class_of_slot;
  std::vector<std::size_t> phase_of_class(fs.class_count(), 0);
  std::map<ClassId, std::vector<std::size_t>> memory;  // keyed by FeatureSet class id
  std::vector<std::size_t> seen_eval;

  for (std::size_t t = 0; t < stream.phases.size(); ++t) {
    const Phase& phase = stream.phases[t];
    for (ClassId c : phase.classes) {
      slot_of_class[c] = static_cast<ClassId>(class_of_slot.size());
      class_of_slot.push_back(c);
      phase_of_class[c] = t;
    }

    LabeledRows train;
    for (std::size_t i : phase.samples) {
      if (split.is_eval[i]) {
        seen_eval.push_back(i);
      } else {
        train.push_back(i, slot_of_class[fs.label(i)]);
      }
    }
    for (const auto& [c, rows] : memory) {
      for (std::size_t i : rows) train.push_back(i, slot_of_class[c]);
    }
    std::sort(seen_eval.begin(), seen_eval.end());

    learner.learn_phase(train.view(fs.features()), phase.classes.size());

    // Integer counts per slot; the merge is order-independent.
    const std::size_t slots = class_of_slot.size();
    std::mutex chunk_mutex;
    std::vector<std::pair<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>>
        partial;
    parallel_for(seen_eval.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<std::size_t> hits(slots, 0);
      std::vector<std::size_t> totals(slots, 0);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = seen_eval[k];
        const ClassId truth = slot_of_class[fs.label(i)];
        ++totals[truth];
        if (learner.predict(fs.sample(i)) == truth) ++hits[truth];
      }
      std::lock_guard lock(chunk_mutex);
      partial.push_back({begin, {std::move(hits), std::move(totals)}});
    });
    std::vector<std::size_t> hits(slots, 0);
    std::vector<std::size_t> totals(slots, 0);
    for (const auto& [begin, counts] : partial) {
      for (std::size_t s = 0; s < slots; ++s) {
        hits[s] += counts.first[s];
        totals[s] += counts.second[s];
      }
    }

    PhaseResult result;
    result.t = t;
    for (ClassId c : phase.classes) result.classes.push_back(fs.original_ids()[c]);
    std::size_t all_hits = 0, all_total = 0, old_hits = 0, old_total = 0, new_hits = 0, new_total = 0;
    for (std::size_t s = 0; s < slots; ++s) {
      const ClassId c = class_of_slot[s];
      all_hits += hits[s];
      all_total += totals[s];
      if (phase_of_class[c] == t) {
        new_hits += hits[s];
        new_total += totals[s];
      } else {
        old_hits += hits[s];
        old_total += totals[s];
      }
      result.per_class.push_back(
          {fs.original_ids()[c],
           totals[s] ? static_cast<double>(hits[s]) / static_cast<double>(totals[s]) : 0.0,
           totals[s]});
    }
    result.eval_count = all_total;
    result.accuracy = static_cast<double>(all_hits) / static_cast<double>(all_total);
    result.new_accuracy = static_cast<double>(new_hits) / static_cast<double>(new_total);
    if (t > 0) result.old_accuracy = static_cast<double>(old_hits) / static_cast<double>(old_total);
    report.phases.push_back(std::move(result));

    if (options.memory_per_class > 0) {
      for (ClassId c : phase.classes) {
        std::vector<std::size_t> rows;
        for (std::size_t i : phase.samples) {
          if (!split.is_eval[i] && fs.label(i) == c) rows.push_back(i);
        }
        memory[c] = herding_select(fs.features(), rows, options.memory_per_class);
      }
    }

    if (observer) {
      PhaseSnapshot snapshot;
      snapshot.t = t;
      snapshot.train_data = &train;
      snapshot.eval_samples = &seen_eval;
      snapshot.memory = &memory;
      snapshot.learner = &learner;
      observer(snapshot);
    }
  }

  double sum = 0.0;
  for (const auto& p : report.phases) sum += p.accuracy;
  report.average_accuracy = sum / static_cast<double>(report.phases.size());
  return report;
}

}  // namespace protocil
