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

#include <cassert>
#include <span>
#include <vector>

#include "protocil/matrix.hpp"

namespace protocil {

// Non-owning view of labeled samples: row rows[k] of `features` carries label
// labels[k]. Labels here are classifier slot ids, not FeatureSet ids.
class SampleView {
 public:
  SampleView(const Matrix& features, std::span<const std::size_t> rows,
             std::span<const ClassId> labels)
      : features_(&features), rows_(rows), labels_(labels) {
    assert(rows.size() == labels.size());
  }

  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t dim() const noexcept { return features_->cols(); }
  std::span<const double> sample(std::size_t k) const { return features_->row(rows_[k]); }
  ClassId label(std::size_t k) const { return labels_[k]; }
  const Matrix& features() const noexcept { return *features_; }
  std::span<const std::size_t> rows() const noexcept { return rows_; }
  std::span<const ClassId> labels() const noexcept { return labels_; }

 private:
  const Matrix* features_;
  std::span<const std::size_t> rows_;
  std::span<const ClassId> labels_;
};

// Owning counterpart, used to assemble phase data (new samples plus replayed
// exemplars) and minibatches.
struct LabeledRows {
  std::vector<std::size_t> rows;
  std::vector<ClassId> labels;

  void push_back(std::size_t row, ClassId label) {
    rows.push_back(row);
    labels.push_back(label);
  }
  std::size_t size() const noexcept { return rows.size(); }
  SampleView view(const Matrix& features) const { return {features, rows, labels}; }
};

// Gathers view[k] for k in `picks` into an owning set.
inline LabeledRows gather(const SampleView& view, std::span<const std::size_t> picks) {
  LabeledRows out;
  out.rows.reserve(picks.size());
  out.labels.reserve(picks.size());
  for (std::size_t k : picks) out.push_back(view.rows()[k], view.label(k));
  return out;
}

}  // namespace protocil
