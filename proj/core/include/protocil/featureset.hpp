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
#include <span>
#include <vector>

#include "protocil/matrix.hpp"

namespace protocil {

// Labeled embedding matrix. Labels are contiguous in [0, class_count());
// original_ids()[c] is the label class c carried in the source file.
//
// Immutable after construction; the constructor enforces every invariant
// (finite values, every class populated, n >= 1, dim >= 1).
class FeatureSet {
 public:
  FeatureSet(Matrix features, std::vector<ClassId> labels,
             std::vector<std::int64_t> original_ids);

  // Identity mapping for original ids.
  FeatureSet(Matrix features, std::vector<ClassId> labels);

  const Matrix& features() const noexcept { return features_; }
  std::span<const ClassId> labels() const noexcept { return labels_; }
  std::span<const std::int64_t> original_ids() const noexcept { return original_ids_; }
  std::size_t size() const noexcept { return features_.rows(); }
  std::size_t dim() const noexcept { return features_.cols(); }
  std::size_t class_count() const noexcept { return original_ids_.size(); }

  std::span<const double> sample(std::size_t i) const { return features_.row(i); }
  ClassId label(std::size_t i) const { return labels_[i]; }

  // Sample indices grouped by class, ascending within each class.
  std::vector<std::vector<std::size_t>> indices_by_class() const;

  // Copy with every row scaled to unit Euclidean norm. Zero rows are an error.
  FeatureSet l2_normalized() const;

 private:
  Matrix features_;
  std::vector<ClassId> labels_;
  std::vector<std::int64_t> original_ids_;
};

// Reads a FEATSET binary file or a labeled CSV (detected by the leading magic
// bytes). Labels are re-indexed to contiguous ids in ascending order of their
// original value. Throws LoadError.
FeatureSet load_featureset(const std::filesystem::path& path);

// Writes the FEATSET binary format. Features are stored as f32, labels as the
// original ids, so a set whose values are f32-representable round-trips
// bit-exactly.
void save_featureset(const FeatureSet& fs, const std::filesystem::path& path);

void save_featureset_csv(const FeatureSet& fs, const std::filesystem::path& path);

struct SynthSpec {
  std::size_t class_count = 10;
  std::size_t dim = 64;
  std::size_t samples_per_class = 100;
  double mean_scale = 10.0;
  double within_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  FeatureSet features;
  Matrix means;  // class_count x dim, the generating centers
};

// Isotropic Gaussian clusters whose centers lie on the sphere of radius
// mean_scale. Samples are rounded to f32 so the set survives a FEATSET
// round-trip unchanged. Pure function of the spec.
SyntheticData generate_synthetic_with_means(const SynthSpec& spec);
FeatureSet generate_synthetic(const SynthSpec& spec);

}  // namespace protocil
