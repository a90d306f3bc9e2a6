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

#include <cmath>
#include <random>
#include <string>

#include "protocil/error.hpp"
#include "protocil/featureset.hpp"

namespace protocil {

void SynthSpec::validate() const {
  if (class_count < 2) throw ConfigError("synthetic spec: classes must be >= 2");
  if (dim < 1) throw ConfigError("synthetic spec: dim must be >= 1");
  if (samples_per_class < 2) throw ConfigError("synthetic spec: per-class must be >= 2");
  if (!(mean_scale > 0.0) || !std::isfinite(mean_scale)) {
    throw ConfigError("synthetic spec: mean-scale must be a positive finite number");
  }
  if (!(within_std > 0.0) || !std::isfinite(within_std)) {
    throw ConfigError("synthetic spec: std must be a positive finite number");
  }
}

SyntheticData generate_synthetic_with_means(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix means(spec.class_count, spec.dim);
  for (std::size_t c = 0; c < spec.class_count; ++c) {
    auto mu = means.row(c);
    double norm2 = 0.0;
    do {
      for (double& v : mu) v = normal(rng);
      norm2 = dot(mu, mu);
    } while (norm2 == 0.0);
    const double scale = spec.mean_scale / std::sqrt(norm2);
    for (double& v : mu) v = static_cast<float>(v * scale);
  }

  const std::size_t n = spec.class_count * spec.samples_per_class;
  Matrix features(n, spec.dim);
  std::vector<ClassId> labels(n);
  std::size_t i = 0;
  for (std::size_t c = 0; c < spec.class_count; ++c) {
    const auto mu = means.row(c);
    for (std::size_t s = 0; s < spec.samples_per_class; ++s, ++i) {
      auto z = features.row(i);
      for (std::size_t j = 0; j < spec.dim; ++j) {
        z[j] = static_cast<float>(mu[j] + spec.within_std * normal(rng));
      }
      labels[i] = static_cast<ClassId>(c);
    }
  }
  return {FeatureSet(std::move(features), std::move(labels)), std::move(means)};
}

FeatureSet generate_synthetic(const SynthSpec& spec) {
  return generate_synthetic_with_means(spec).features;
}

}  // namespace protocil
