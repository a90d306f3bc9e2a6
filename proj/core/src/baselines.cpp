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

#include "protocil/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "protocil/error.hpp"

namespace protocil {

namespace {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void check_dim(std::size_t expected, std::size_t got) {
  if (got != expected) {
    throw ConfigError("feature dimension " + std::to_string(got) +
                      " does not match head dimension " + std::to_string(expected));
  }
}

ClassId argmax(std::span<const double> scores) {
  ClassId best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = static_cast<ClassId>(i);
  }
  return best;
}

}  // namespace

LinearHead::LinearHead(std::size_t dim, bool normalized)
    : weights_(0, dim), normalized_(normalized) {
  if (dim == 0) throw ConfigError("head dimension must be >= 1");
}

LinearHead::LinearHead(Matrix weights, std::vector<double> biases, bool normalized)
    : weights_(std::move(weights)), biases_(std::move(biases)), normalized_(normalized) {
  if (weights_.cols() == 0) throw ConfigError("head dimension must be >= 1");
  if (biases_.size() != weights_.rows()) {
    throw ConfigError("linear head has " + std::to_string(weights_.rows()) + " rows but " +
                      std::to_string(biases_.size()) + " biases");
  }
}

void LinearHead::grow(std::size_t count, std::uint64_t seed) {
  const std::size_t first = weights_.rows();
  weights_.append_rows(count, 0.0);
  biases_.resize(weights_.rows(), 0.0);
  if (!normalized_) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t r = first; r < weights_.rows(); ++r) {
    auto w = weights_.row(r);
    double n2 = 0.0;
    do {
      for (double& v : w) v = normal(rng);
      n2 = dot(w, w);
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : w) v *= inv;
  }
}

void LinearHead::renormalize_rows() {
  for (std::size_t r = 0; r < weights_.rows(); ++r) {
    auto w = weights_.row(r);
    const double n = norm(w);
    if (n > 0.0) {
      for (double& v : w) v /= n;
    }
  }
}

std::vector<double> LinearHead::scores(std::span<const double> z) const {
  check_dim(dim(), z.size());
  std::vector<double> s(class_count());
  if (normalized_) {
    const double zn = norm(z);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double wn = norm(weights_.row(i));
      s[i] = (zn == 0.0 || wn == 0.0) ? 0.0 : dot(weights_.row(i), z) / (wn * zn);
    }
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = dot(weights_.row(i), z) + biases_[i];
  }
  return s;
}

LinearHead train_linear(LinearHead head, const SampleView& data, const TrainConfig& cfg) {
  if (data.empty()) throw ConfigError("train_linear needs at least one sample");
  check_dim(head.dim(), data.dim());
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data.label(k) >= head.class_count()) {
      throw ConfigError("label " + std::to_string(data.label(k)) + " is out of range for a head with " +
                        std::to_string(head.class_count()) + " classes");
    }
  }
  const std::size_t classes = head.class_count();
  const std::size_t dim = head.dim();
  const bool cosine = head.normalized();

  MomentumSgd weight_sgd(classes * dim, cfg.momentum);
  MomentumSgd bias_sgd(classes, cfg.momentum);
  Matrix grad_w(classes, dim);
  std::vector<double> grad_b(classes);
  std::vector<double> p(classes);
  std::vector<double> weight_norms(classes);

  run_minibatches(
      data.size(), cfg,
      [&](std::span<const std::size_t> picks, double lr) {
        std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        const Matrix& w = head.weights();
        if (cosine) {
          for (std::size_t i = 0; i < classes; ++i) weight_norms[i] = norm(w.row(i));
        }
        const double inv_n = 1.0 / static_cast<double>(picks.size());
        for (std::size_t k : picks) {
          const auto z = data.sample(k);
          const ClassId y = data.label(k);
          const auto s = head.scores(z);
          const double s_max = *std::max_element(s.begin(), s.end());
          double total = 0.0;
          for (std::size_t i = 0; i < classes; ++i) total += p[i] = std::exp(s[i] - s_max);
          const double zn = cosine ? norm(z) : 1.0;
          for (std::size_t i = 0; i < classes; ++i) {
            const double delta = (p[i] / total - (i == y ? 1.0 : 0.0)) * inv_n;
            auto g = grad_w.row(i);
            if (cosine) {
              // d cos / d w = (z/|z| - cos * w/|w|) / |w|
              const double wn = weight_norms[i];
              if (wn == 0.0 || zn == 0.0) continue;
              const auto wi = w.row(i);
              for (std::size_t j = 0; j < dim; ++j) {
                g[j] += delta * (z[j] / zn - s[i] * wi[j] / wn) / wn;
              }
            } else {
              for (std::size_t j = 0; j < dim; ++j) g[j] += delta * z[j];
              grad_b[i] += delta;
            }
          }
        }
        weight_sgd.step(head.mutable_weights().data(), grad_w.data(), lr);
        if (!cosine) bias_sgd.step(head.mutable_biases(), grad_b, lr);
      },
      [&](std::size_t) {
        if (cosine) head.renormalize_rows();
      });

  for (double v : head.weights().data()) {
    if (!std::isfinite(v)) throw NumericError("linear head training diverged");
  }
  return head;
}

ClassId predict_linear(const LinearHead& head, std::span<const double> z) {
  if (head.class_count() == 0) throw ConfigError("predict needs at least one class");
  return argmax(head.scores(z));
}

NmeHead fit_nme(const SampleView& data, std::size_t class_count) {
  if (class_count == 0) throw ConfigError("fit_nme needs at least one class");
  NmeHead head{Matrix(class_count, data.dim()), std::vector<std::size_t>(class_count, 0)};
  for (std::size_t k = 0; k < data.size(); ++k) {
    const ClassId y = data.label(k);
    if (y >= class_count) {
      throw ConfigError("label " + std::to_string(y) + " is out of range for " +
                        std::to_string(class_count) + " classes");
    }
    auto m = head.class_means.row(y);
    const auto z = data.sample(k);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += z[j];
    ++head.counts[y];
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    if (head.counts[c] == 0) {
      throw DataError("class " + std::to_string(c) + " has no samples to compute a mean from");
    }
    for (double& v : head.class_means.row(c)) v /= static_cast<double>(head.counts[c]);
  }
  return head;
}

ClassId predict_nme(const NmeHead& head, std::span<const double> z) {
  if (head.class_count() == 0) throw ConfigError("predict needs at least one class");
  check_dim(head.class_means.cols(), z.size());
  ClassId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < head.class_count(); ++i) {
    const double d = squared_distance(z, head.class_means.row(i));
    if (d < best_d) {
      best_d = d;
      best = static_cast<ClassId>(i);
    }
  }
  return best;
}

}  // namespace protocil
