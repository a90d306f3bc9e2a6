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

#include "protocil/task_stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "json.hpp"
#include "protocil/error.hpp"

namespace protocil {

void TaskStream::validate(const FeatureSet& fs) const {
  if (class_count != fs.class_count()) {
    throw DataError("task stream covers " + std::to_string(class_count) +
                    " classes but the feature set has " + std::to_string(fs.class_count()));
  }
  if (phases.empty()) throw DataError("task stream has no phases");
  std::vector<int> class_phase(class_count, -1);
  for (std::size_t t = 0; t < phases.size(); ++t) {
    if (phases[t].classes.empty()) {
      throw DataError("phase " + std::to_string(t) + " has no classes");
    }
    for (ClassId c : phases[t].classes) {
      if (c >= class_count) {
        throw DataError("phase " + std::to_string(t) + " names class " + std::to_string(c) +
                        " outside [0, " + std::to_string(class_count) + ")");
      }
      if (class_phase[c] != -1) {
        throw DataError("class " + std::to_string(c) + " appears in phases " +
                        std::to_string(class_phase[c]) + " and " + std::to_string(t));
      }
      class_phase[c] = static_cast<int>(t);
    }
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    if (class_phase[c] == -1) {
      throw DataError("class " + std::to_string(c) + " is not assigned to any phase");
    }
  }
  std::vector<bool> seen(fs.size(), false);
  for (std::size_t t = 0; t < phases.size(); ++t) {
    for (std::size_t i : phases[t].samples) {
      if (i >= fs.size()) {
        throw DataError("phase " + std::to_string(t) + " references sample " + std::to_string(i) +
                        " beyond " + std::to_string(fs.size()));
      }
      if (seen[i]) throw DataError("sample " + std::to_string(i) + " appears twice");
      seen[i] = true;
      if (class_phase[fs.label(i)] != static_cast<int>(t)) {
        throw DataError("sample " + std::to_string(i) + " of class " +
                        std::to_string(fs.label(i)) + " is placed in phase " + std::to_string(t));
      }
    }
  }
  const auto missing = std::find(seen.begin(), seen.end(), false);
  if (missing != seen.end()) {
    throw DataError("sample " + std::to_string(missing - seen.begin()) +
                    " is not assigned to any phase");
  }
}

TaskStream split_tasks(const FeatureSet& fs, std::size_t phase_count, double base_fraction,
                       std::size_t memory_per_class, std::optional<std::uint64_t> shuffle_seed) {
  const std::size_t classes = fs.class_count();
  if (!(base_fraction > 0.0 && base_fraction <= 1.0)) {
    throw ConfigError("base fraction must lie in (0, 1], got " + std::to_string(base_fraction));
  }
  const double exact_base = static_cast<double>(classes) * base_fraction;
  const double rounded_base = std::round(exact_base);
  if (std::abs(exact_base - rounded_base) > 1e-9 || rounded_base < 1.0) {
    throw ConfigError(std::to_string(classes) + " classes * base fraction " +
                      std::to_string(base_fraction) + " = " + std::to_string(exact_base) +
                      " is not a positive whole number of base classes");
  }
  const auto base = static_cast<std::size_t>(rounded_base);
  const std::size_t remaining = classes - base;
  if (remaining == 0 && phase_count != 0) {
    throw ConfigError("base phase takes all " + std::to_string(classes) +
                      " classes, so the number of incremental phases must be 0, got " +
                      std::to_string(phase_count));
  }
  if (remaining > 0 && (phase_count == 0 || remaining % phase_count != 0)) {
    throw ConfigError(std::to_string(remaining) + " remaining classes (" +
                      std::to_string(classes) + " - " + std::to_string(base) +
                      " base) cannot be split evenly into " + std::to_string(phase_count) +
                      " phases");
  }

  std::vector<ClassId> order(classes);
  std::iota(order.begin(), order.end(), ClassId{0});
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  TaskStream stream;
  stream.class_count = classes;
  stream.memory_per_class = memory_per_class;
  stream.base_fraction = base_fraction;
  const std::size_t block = phase_count == 0 ? 0 : remaining / phase_count;
  std::vector<std::size_t> phase_of_class(classes);
  auto add_phase = [&](std::size_t begin, std::size_t end) {
    Phase phase;
    phase.classes.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    for (ClassId c : phase.classes) phase_of_class[c] = stream.phases.size();
    stream.phases.push_back(std::move(phase));
  };
  add_phase(0, base);
  for (std::size_t t = 0; t < phase_count; ++t) add_phase(base + t * block, base + (t + 1) * block);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    stream.phases[phase_of_class[fs.label(i)]].samples.push_back(i);
  }
  return stream;
}

void save_task_stream(const TaskStream& stream, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["format"] = "protocil-stream";
  doc["version"] = 1;
  doc["class_count"] = stream.class_count;
  doc["memory_per_class"] = stream.memory_per_class;
  doc["base_fraction"] = stream.base_fraction;
  doc["phases"] = nlohmann::ordered_json::array();
  for (const auto& phase : stream.phases) {
    doc["phases"].push_back({{"classes", phase.classes}, {"samples", phase.samples}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write task stream '" + path.string() + "'");
  out << doc.dump(1) << '\n';
}

TaskStream load_task_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open task stream '" + path.string() + "'");
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != "protocil-stream" || doc.value("version", 0) != 1) {
      throw DataError("'" + path.string() + "' is not a version-1 protocil task stream");
    }
    TaskStream stream;
    stream.class_count = doc.at("class_count").get<std::size_t>();
    stream.memory_per_class = doc.at("memory_per_class").get<std::size_t>();
    stream.base_fraction = doc.at("base_fraction").get<double>();
    for (const auto& p : doc.at("phases")) {
      stream.phases.push_back(
          {p.at("classes").get<std::vector<ClassId>>(), p.at("samples").get<std::vector<std::size_t>>()});
    }
    return stream;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed task stream '" + path.string() + "': " + e.what());
  }
}

}  // namespace protocil
