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
#include <span>
#include <vector>

#include "protocil/matrix.hpp"
#include "protocil/optim.hpp"
#include "protocil/samples.hpp"

namespace protocil {

// Softmax linear head. With `normalized` set, a class scores cos(w_i, z)
// instead of w_i.z + b_i and the biases are ignored.
class LinearHead {
 public:
  LinearHead(std::size_t dim, bool normalized);
  LinearHead(Matrix weights, std::vector<double> biases, bool normalized);

  std::size_t class_count() const noexcept { return weights_.rows(); }
  std::size_t dim() const noexcept { return weights_.cols(); }
  bool normalized() const noexcept { return normalized_; }
  const Matrix& weights() const noexcept { return weights_; }
  std::span<const double> biases() const noexcept { return biases_; }
  Matrix& mutable_weights() noexcept { return weights_; }
  std::span<double> mutable_biases() noexcept { return biases_; }

  // New rows start at zero (plain) or as seeded random unit vectors (cosine).
  void grow(std::size_t count, std::uint64_t seed);

  // Rescales every weight row to unit norm; no-op for zero rows.
  void renormalize_rows();

  std::vector<double> scores(std::span<const double> z) const;

 private:
  Matrix weights_;
  std::vector<double> biases_;
  bool normalized_;
};

// Cross-entropy on softmax(scores) by minibatch momentum SGD over every row.
// Nothing is frozen. Cosine heads are renormalized at the end of each epoch.
LinearHead train_linear(LinearHead head, const SampleView& data, const TrainConfig& cfg);

// Highest score; ties go to the lowest class id.
ClassId predict_linear(const LinearHead& head, std::span<const double> z);

struct NmeHead {
  Matrix class_means;
  std::vector<std::size_t> counts;

  std::size_t class_count() const noexcept { return class_means.rows(); }
};

// Class means over the available samples. Every class in [0, class_count)
// needs at least one sample.
NmeHead fit_nme(const SampleView& data, std::size_t class_count);

// Nearest mean by Euclidean distance; ties go to the lowest class id.
ClassId predict_nme(const NmeHead& head, std::span<const double> z);

}  // namespace protocil
