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
#include <filesystem>
#include <optional>
#include <vector>

#include "protocil/featureset.hpp"

namespace protocil {

struct Phase {
  std::vector<ClassId> classes;      // FeatureSet class ids, in arrival order
  std::vector<std::size_t> samples;  // ascending sample indices
};

// Ordered class-incremental phases. Phase 0 is the base phase.
struct TaskStream {
  std::vector<Phase> phases;
  std::size_t class_count = 0;
  std::size_t memory_per_class = 0;
  double base_fraction = 0.5;

  // Number of incremental phases after the base phase.
  std::size_t incremental_phases() const { return phases.empty() ? 0 : phases.size() - 1; }

  // Throws DataError unless the phases partition both the classes and the
  // samples of `fs`, and every sample sits in the phase that owns its class.
  void validate(const FeatureSet& fs) const;
};

// Base phase gets class_count * base_fraction classes; the remainder is split
// into `phase_count` equal blocks. Class order is ascending id unless
// `shuffle_seed` is given.
TaskStream split_tasks(const FeatureSet& fs, std::size_t phase_count, double base_fraction,
                       std::size_t memory_per_class,
                       std::optional<std::uint64_t> shuffle_seed = std::nullopt);

void save_task_stream(const TaskStream& stream, const std::filesystem::path& path);
TaskStream load_task_stream(const std::filesystem::path& path);

}  // namespace protocil
