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

#include <limits>
#include <string>
#include <vector>

#include "protocil/error.hpp"
#include "protocil/harness.hpp"

namespace protocil {

std::vector<std::size_t> herding_select(const Matrix& features,
                                        std::span<const std::size_t> class_rows,
                                        std::size_t budget) {
  if (class_rows.empty()) throw DataError("herding needs at least one sample in the class");
  if (budget == 0) throw ConfigError("herding budget must be >= 1");
  const std::size_t n = class_rows.size();
  const std::size_t dim = features.cols();

  std::vector<double> mean(dim, 0.0);
  for (std::size_t row : class_rows) {
    const auto z = features.row(row);
    for (std::size_t j = 0; j < dim; ++j) mean[j] += z[j];
  }
  for (double& v : mean) v /= static_cast<double>(n);

  const std::size_t picks = std::min(budget, n);
  std::vector<std::size_t> selected;
  selected.reserve(picks);
  std::vector<bool> taken(n, false);
  std::vector<double> running_sum(dim, 0.0);
  std::vector<double> candidate(dim);

  for (std::size_t k = 1; k <= picks; ++k) {
    const double inv_k = 1.0 / static_cast<double>(k);
    std::size_t best = n;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const auto z = features.row(class_rows[c]);
      for (std::size_t j = 0; j < dim; ++j) candidate[j] = (running_sum[j] + z[j]) * inv_k;
      const double gap = squared_distance(mean, candidate);
      // Strict comparison keeps the earliest candidate on ties; class_rows is
      // expected in ascending order, so that is the lowest sample index.
      if (gap < best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    if (best == n) {
      throw NumericError("herding: candidate means are not finite");
    }
    taken[best] = true;
    selected.push_back(class_rows[best]);
    const auto z = features.row(class_rows[best]);
    for (std::size_t j = 0; j < dim; ++j) running_sum[j] += z[j];
  }
  return selected;
}

}  // namespace protocil
