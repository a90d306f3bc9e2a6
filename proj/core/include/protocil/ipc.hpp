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
#include "protocil/optim.hpp"
#include "protocil/samples.hpp"

namespace protocil {

inline constexpr double kDefaultGamma = 1.0;
inline constexpr double kDefaultLambda = 0.3;

// Incremental prototype classifier: one prototype per class, scored by
// squared Euclidean distance. Rows [0, frozen_count) are old-class prototypes
// that still take part in the softmax but never receive gradient.
class PrototypeClassifier {
 public:
  explicit PrototypeClassifier(std::size_t dim, double gamma = kDefaultGamma,
                               double lambda = kDefaultLambda);
  PrototypeClassifier(Matrix prototypes, std::size_t frozen_count, double gamma, double lambda);

  std::size_t class_count() const noexcept { return prototypes_.rows(); }
  std::size_t dim() const noexcept { return prototypes_.cols(); }
  std::size_t frozen_count() const noexcept { return frozen_count_; }
  double gamma() const noexcept { return gamma_; }
  double lambda() const noexcept { return lambda_; }
  const Matrix& prototypes() const noexcept { return prototypes_; }
  std::span<const double> prototype(std::size_t i) const { return prototypes_.row(i); }

  void append_prototype(std::span<const double> init);
  void freeze_all() noexcept { frozen_count_ = prototypes_.rows(); }

  // Contiguous storage of the trainable rows [frozen_count, class_count).
  std::span<double> trainable_block();

 private:
  Matrix prototypes_;
  std::size_t frozen_count_ = 0;
  double gamma_;
  double lambda_;
};

// kPrototypeOnly drops the cross-entropy term, leaving lambda * PL.
enum class Objective { kHybrid, kPrototypeOnly };

struct LossBreakdown {
  double ce = 0.0;
  double pl = 0.0;
  double total = 0.0;
};

// d_i = ||z - phi_i||^2 for every prototype.
std::vector<double> distances(const PrototypeClassifier& clf, std::span<const double> z);

// Distance softmax p_i = exp(-gamma d_i) / sum_k exp(-gamma d_k), evaluated as
// exp(-gamma (d_i - min d)) for stability.
std::vector<double> posterior(const PrototypeClassifier& clf, std::span<const double> z);

// Batch means of -log p(y|z) and ||z - phi_y||^2; total = ce + lambda * pl
// (ce is reported but excluded from total under kPrototypeOnly).
LossBreakdown hybrid_loss(const PrototypeClassifier& clf, const SampleView& batch,
                          Objective objective = Objective::kHybrid);

// dL/dphi, C x d. Rows of frozen prototypes are exactly zero.
//   dL/dphi_i = mean_k [ 2 gamma (delta_iy - p_i)(phi_i - z_k) + 2 lambda delta_iy (phi_i - z_k) ]
Matrix loss_gradient(const PrototypeClassifier& clf, const SampleView& batch,
                     Objective objective = Objective::kHybrid);

// Runs minibatch momentum SGD on the trainable prototypes. Does not grow or
// freeze anything. Throws NumericError if a prototype becomes non-finite.
void optimize_prototypes(PrototypeClassifier& clf, const SampleView& data,
                         const TrainConfig& cfg, Objective objective = Objective::kHybrid);

// One incremental phase. `new_classes` must be exactly the next slot ids
// [C, C + k); their prototypes start at the class mean of `data`, are
// optimized, and on return every prototype is frozen. `data` may also contain
// replayed samples of old classes.
PrototypeClassifier train_phase(PrototypeClassifier clf, const SampleView& data,
                                std::span<const ClassId> new_classes, const TrainConfig& cfg,
                                Objective objective = Objective::kHybrid);

// Nearest prototype; ties go to the lowest class id.
ClassId predict(const PrototypeClassifier& clf, std::span<const double> z);

// g_i(z) = 2 phi_i.z - phi_i.phi_i - z.z, which equals -d_i(z).
double linear_discriminant(const PrototypeClassifier& clf, std::span<const double> z,
                           std::size_t i);

// "IPC1" checkpoint: u32 C, u32 d, u32 frozen_count, f64 gamma, f64 lambda,
// then C*d f64 prototypes row-major. Little-endian throughout.
void save_checkpoint(const PrototypeClassifier& clf, const std::filesystem::path& path);
PrototypeClassifier load_checkpoint(const std::filesystem::path& path);

}  // namespace protocil
