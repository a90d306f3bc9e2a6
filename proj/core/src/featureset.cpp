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

#include "protocil/featureset.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "protocil/error.hpp"

namespace protocil {

namespace {

std::vector<std::int64_t> identity_ids(std::span<const ClassId> labels) {
  ClassId max_label = 0;
  for (ClassId l : labels) max_label = std::max(max_label, l);
  std::vector<std::int64_t> ids(labels.empty() ? 0 : max_label + 1);
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return ids;
}

}  // namespace

FeatureSet::FeatureSet(Matrix features, std::vector<ClassId> labels)
    : FeatureSet(std::move(features), labels, identity_ids(labels)) {}

FeatureSet::FeatureSet(Matrix features, std::vector<ClassId> labels,
                       std::vector<std::int64_t> original_ids)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      original_ids_(std::move(original_ids)) {
  if (features_.rows() == 0 || features_.cols() == 0) {
    throw DataError("feature set must have at least one sample and one dimension");
  }
  if (labels_.size() != features_.rows()) {
    throw DataError("feature set has " + std::to_string(features_.rows()) +
                    " samples but " + std::to_string(labels_.size()) + " labels");
  }
  std::vector<std::size_t> counts(original_ids_.size(), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= original_ids_.size()) {
      throw DataError("label " + std::to_string(labels_[i]) + " of sample " +
                      std::to_string(i) + " is outside [0, " +
                      std::to_string(original_ids_.size()) + ")");
    }
    ++counts[labels_[i]];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DataError("class " + std::to_string(c) + " has no samples");
    }
  }
  const auto values = features_.data();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw DataError("non-finite feature value at sample " +
                      std::to_string(k / features_.cols()) + ", coordinate " +
                      std::to_string(k % features_.cols()));
    }
  }
}

std::vector<std::vector<std::size_t>> FeatureSet::indices_by_class() const {
  std::vector<std::vector<std::size_t>> groups(class_count());
  for (std::size_t i = 0; i < labels_.size(); ++i) groups[labels_[i]].push_back(i);
  return groups;
}

FeatureSet FeatureSet::l2_normalized() const {
  Matrix out = features_;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    const double norm = std::sqrt(dot(row, row));
    if (norm == 0.0) {
      throw DataError("cannot L2-normalize zero vector at sample " + std::to_string(i));
    }
    for (double& v : row) v /= norm;
  }
  return FeatureSet(std::move(out), labels_, original_ids_);
}

}  // namespace protocil
