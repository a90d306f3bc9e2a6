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

// Independent reference implementations used as test oracles. None of these
// share code with the library beyond the plain data types.

#include <cstdint>
#include <span>
#include <vector>

#include "protocil/harness.hpp"
#include "protocil/ipc.hpp"
#include "protocil/matrix.hpp"

namespace protocil::testing {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform in [-1, 1), exact in binary64.
  double unit() { return static_cast<double>(next() >> 11) * 0x1p-52 - 1.0; }
};

// Symmetric n x n matrix filled row by row over the upper triangle.
Matrix splitmix_symmetric(std::uint64_t seed, std::size_t n);

// Batch-mean hybrid loss evaluated in long double with textbook formulas.
long double reference_loss(const Matrix& prototypes, const SampleView& batch, double gamma,
                           double lambda, bool prototype_only);

// Central differences of reference_loss w.r.t. every prototype entry.
Matrix finite_difference_gradient(const Matrix& prototypes, const SampleView& batch,
                                  double gamma, double lambda, bool prototype_only,
                                  double step);

// Argmin of long-double distances, lowest index on ties.
std::size_t brute_force_nearest(const Matrix& prototypes, std::span<const double> z);

// Greedy herding recomputed from scratch at every step: picks the candidate
// minimizing || mu - (sum_selected + x) / k || in long double.
std::vector<std::size_t> brute_force_herding(const Matrix& features,
                                             std::span<const std::size_t> class_rows,
                                             std::size_t budget);

// Joint-training reference: keeps every sample it has ever been shown and
// retrains a fresh prototype classifier on all of them each phase.
class JointLearner final : public Learner {
 public:
  JointLearner(std::size_t dim, const MethodConfig& config) : dim_(dim), config_(config) {}
  std::string name() const override { return "joint"; }
  void learn_phase(const SampleView& data, std::size_t new_class_count) override;
  ClassId predict(std::span<const double> z) const override;

 private:
  std::size_t dim_;
  MethodConfig config_;
  LabeledRows seen_;
  std::size_t classes_ = 0;
  std::size_t phase_ = 0;
  PrototypeClassifier clf_{1};
};

}  // namespace protocil::testing
