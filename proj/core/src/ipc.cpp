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

#include "protocil/ipc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "protocil/error.hpp"

namespace protocil {

namespace {

void check_dim(const PrototypeClassifier& clf, std::size_t got) {
  if (got != clf.dim()) {
    throw ConfigError("feature dimension " + std::to_string(got) +
                      " does not match classifier dimension " + std::to_string(clf.dim()));
  }
}

void check_batch(const PrototypeClassifier& clf, const SampleView& batch) {
  if (batch.empty()) throw ConfigError("loss needs a non-empty batch");
  check_dim(clf, batch.dim());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch.label(k) >= clf.class_count()) {
      throw ConfigError("label " + std::to_string(batch.label(k)) + " is out of range for " +
                        std::to_string(clf.class_count()) + " prototypes");
    }
  }
}

void check_params(double gamma, double lambda) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must satisfy gamma > 0, got " + std::to_string(gamma));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must satisfy lambda >= 0, got " + std::to_string(lambda));
  }
}

// Softmax over -gamma * d, shifted by the smallest distance. Writes the
// probabilities into `p` and returns log of the normalizer (relative to the
// shift), so -log p_y = gamma (d_y - d_min) + log_norm.
double softmax_from_distances(std::span<const double> d, double gamma, std::span<double> p) {
  const double d_min = *std::min_element(d.begin(), d.end());
  double norm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    p[i] = std::exp(-gamma * (d[i] - d_min));
    norm += p[i];
  }
  for (double& v : p) v /= norm;
  return std::log(norm);
}

// Gradient of the batch loss for rows [first_row, C), (C - first_row) x d.
Matrix gradient_rows(const PrototypeClassifier& clf, const SampleView& batch,
                     Objective objective, std::size_t first_row) {
  const std::size_t classes = clf.class_count();
  const std::size_t dim = clf.dim();
  Matrix grad(classes - first_row, dim);
  if (first_row == classes) return grad;

  const double gamma = clf.gamma();
  const double lambda = clf.lambda();
  const bool with_ce = objective == Objective::kHybrid;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> d(classes);
  std::vector<double> p(classes);

  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto z = batch.sample(k);
    const ClassId y = batch.label(k);
    for (std::size_t i = 0; i < classes; ++i) d[i] = squared_distance(z, clf.prototype(i));
    if (with_ce) softmax_from_distances(d, gamma, p);
    for (std::size_t i = first_row; i < classes; ++i) {
      double coeff = 0.0;
      if (with_ce) coeff += 2.0 * gamma * ((i == y ? 1.0 : 0.0) - p[i]);
      if (i == y) coeff += 2.0 * lambda;
      if (coeff == 0.0) continue;
      coeff *= inv_n;
      auto g = grad.row(i - first_row);
      const auto phi = clf.prototype(i);
      for (std::size_t j = 0; j < dim; ++j) g[j] += coeff * (phi[j] - z[j]);
    }
  }
  return grad;
}

}  // namespace

PrototypeClassifier::PrototypeClassifier(std::size_t dim, double gamma, double lambda)
    : prototypes_(0, dim), gamma_(gamma), lambda_(lambda) {
  if (dim == 0) throw ConfigError("prototype dimension must be >= 1");
  check_params(gamma, lambda);
}

PrototypeClassifier::PrototypeClassifier(Matrix prototypes, std::size_t frozen_count,
                                         double gamma, double lambda)
    : prototypes_(std::move(prototypes)), frozen_count_(frozen_count), gamma_(gamma),
      lambda_(lambda) {
  if (prototypes_.cols() == 0) throw ConfigError("prototype dimension must be >= 1");
  check_params(gamma, lambda);
  if (frozen_count_ > prototypes_.rows()) {
    throw ConfigError("frozen count " + std::to_string(frozen_count_) + " exceeds " +
                      std::to_string(prototypes_.rows()) + " prototypes");
  }
  for (double v : prototypes_.data()) {
    if (!std::isfinite(v)) throw NumericError("prototype matrix contains a non-finite entry");
  }
}

void PrototypeClassifier::append_prototype(std::span<const double> init) {
  check_dim(*this, init.size());
  prototypes_.append_row(init);
}

std::span<double> PrototypeClassifier::trainable_block() {
  return prototypes_.data().subspan(frozen_count_ * prototypes_.cols());
}

std::vector<double> distances(const PrototypeClassifier& clf, std::span<const double> z) {
  check_dim(clf, z.size());
  std::vector<double> d(clf.class_count());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = squared_distance(z, clf.prototype(i));
  return d;
}

std::vector<double> posterior(const PrototypeClassifier& clf, std::span<const double> z) {
  if (clf.class_count() == 0) throw ConfigError("posterior needs at least one prototype");
  const auto d = distances(clf, z);
  std::vector<double> p(d.size());
  softmax_from_distances(d, clf.gamma(), p);
  return p;
}

LossBreakdown hybrid_loss(const PrototypeClassifier& clf, const SampleView& batch,
                          Objective objective) {
  check_batch(clf, batch);
  const std::size_t classes = clf.class_count();
  std::vector<double> d(classes);
  std::vector<double> p(classes);
  double ce = 0.0;
  double pl = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto z = batch.sample(k);
    const ClassId y = batch.label(k);
    for (std::size_t i = 0; i < classes; ++i) d[i] = squared_distance(z, clf.prototype(i));
    const double d_min = *std::min_element(d.begin(), d.end());
    const double log_norm = softmax_from_distances(d, clf.gamma(), p);
    ce += clf.gamma() * (d[y] - d_min) + log_norm;
    pl += d[y];
  }
  const double n = static_cast<double>(batch.size());
  LossBreakdown out;
  out.ce = ce / n;
  out.pl = pl / n;
  out.total = (objective == Objective::kHybrid ? out.ce : 0.0) + clf.lambda() * out.pl;
  return out;
}

Matrix loss_gradient(const PrototypeClassifier& clf, const SampleView& batch,
                     Objective objective) {
  check_batch(clf, batch);
  const Matrix trainable = gradient_rows(clf, batch, objective, clf.frozen_count());
  Matrix grad(clf.class_count(), clf.dim());
  const auto src = trainable.data();
  std::copy(src.begin(), src.end(),
            grad.data().begin() + static_cast<std::ptrdiff_t>(clf.frozen_count() * clf.dim()));
  return grad;
}

void optimize_prototypes(PrototypeClassifier& clf, const SampleView& data,
                         const TrainConfig& cfg, Objective objective) {
  check_batch(clf, data);
  cfg.validate();
  const std::size_t first = clf.frozen_count();
  if (first == clf.class_count()) return;

  MomentumSgd sgd(clf.trainable_block().size(), cfg.momentum);
  run_minibatches(data.size(), cfg, [&](std::span<const std::size_t> picks, double lr) {
    const LabeledRows batch = gather(data, picks);
    const Matrix grad = gradient_rows(clf, batch.view(data.features()), objective, first);
    sgd.step(clf.trainable_block(), grad.data(), lr);
  });
  for (double v : clf.trainable_block()) {
    if (!std::isfinite(v)) {
      throw NumericError("prototype training diverged (non-finite prototype); lower the "
                         "learning rate or gamma");
    }
  }
}

PrototypeClassifier train_phase(PrototypeClassifier clf, const SampleView& data,
                                std::span<const ClassId> new_classes, const TrainConfig& cfg,
                                Objective objective) {
  if (data.empty()) throw ConfigError("train_phase needs at least one sample");
  if (new_classes.empty()) throw ConfigError("train_phase needs at least one new class");
  check_dim(clf, data.dim());
  cfg.validate();

  const std::size_t old_count = clf.class_count();
  const std::size_t total = old_count + new_classes.size();
  std::vector<bool> claimed(new_classes.size(), false);
  for (ClassId c : new_classes) {
    if (c < old_count) {
      throw ConfigError("class " + std::to_string(c) + " already has a prototype (" +
                        std::to_string(old_count) + " classes learned)");
    }
    if (c >= total || claimed[c - old_count]) {
      throw ConfigError("new classes must be the distinct slot ids [" + std::to_string(old_count) +
                        ", " + std::to_string(total) + ")");
    }
    claimed[c - old_count] = true;
  }

  // The incoming classifier's frozen rows stay frozen; anything it left
  // trainable is frozen now, since a phase only ever trains its own classes.
  clf.freeze_all();

  Matrix sums(new_classes.size(), clf.dim());
  std::vector<std::size_t> counts(new_classes.size(), 0);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const ClassId y = data.label(k);
    if (y >= total) {
      throw ConfigError("label " + std::to_string(y) + " is out of range for " +
                        std::to_string(total) + " classes");
    }
    if (y < old_count) continue;
    auto s = sums.row(y - old_count);
    const auto z = data.sample(k);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += z[j];
    ++counts[y - old_count];
  }
  for (std::size_t c = 0; c < new_classes.size(); ++c) {
    if (counts[c] == 0) {
      throw ConfigError("new class " + std::to_string(old_count + c) + " has no samples");
    }
    auto s = sums.row(c);
    for (double& v : s) v /= static_cast<double>(counts[c]);
    clf.append_prototype(s);
  }

  optimize_prototypes(clf, data, cfg, objective);
  clf.freeze_all();
  return clf;
}

ClassId predict(const PrototypeClassifier& clf, std::span<const double> z) {
  check_dim(clf, z.size());
  if (clf.class_count() == 0) throw ConfigError("predict needs at least one prototype");
  ClassId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < clf.class_count(); ++i) {
    const double d = squared_distance(z, clf.prototype(i));
    if (d < best_d) {
      best_d = d;
      best = static_cast<ClassId>(i);
    }
  }
  return best;
}

double linear_discriminant(const PrototypeClassifier& clf, std::span<const double> z,
                           std::size_t i) {
  check_dim(clf, z.size());
  if (i >= clf.class_count()) {
    throw ConfigError("class index " + std::to_string(i) + " out of range for " +
                      std::to_string(clf.class_count()) + " prototypes");
  }
  const auto phi = clf.prototype(i);
  return 2.0 * dot(phi, z) - dot(phi, phi) - dot(z, z);
}

}  // namespace protocil
