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

#include "protocil/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "protocil/error.hpp"
#include "protocil/parallel.hpp"

namespace protocil {

namespace {

constexpr double kClampTolerance = 1e-10;

}  // namespace

std::size_t pc_id_from_cumulative(const std::vector<double>& cumulative, double threshold) {
  const double slack = threshold * 1e-12;
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    if (cumulative[k] >= threshold - slack) return k + 1;
  }
  return cumulative.size();
}

SpectrumReport covariance_spectrum(const FeatureSet& fs, bool normalize_features) {
  const std::size_t n = fs.size();
  const std::size_t d = fs.dim();
  if (n < 2) throw ConfigError("covariance spectrum needs at least 2 samples");

  Matrix x = normalize_features ? fs.l2_normalized().features() : fs.features();
  std::vector<double> mean(d, 0.0);
  double mean_sq_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    mean_sq_norm += dot(r, r);
  }
  for (double& m : mean) m /= static_cast<double>(n);
  mean_sq_norm /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) r[j] -= mean[j];
  }

  SpectrumReport report;
  report.dim = d;
  report.samples = n;
  report.normalized_features = normalize_features;
  report.used_gram = n <= d;

  const double denom = static_cast<double>(n - 1);
  Matrix cov;
  if (report.used_gram) {
    cov = Matrix(n, n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        for (std::size_t b = 0; b < n; ++b) cov(a, b) = dot(x.row(a), x.row(b)) / denom;
      }
    }, 16);
  } else {
    cov = Matrix(d, d);
    parallel_for(d, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += x(i, a) * x(i, b);
          cov(a, b) = s / denom;
        }
      }
    }, 16);
  }

  double trace = 0.0;
  for (std::size_t i = 0; i < cov.rows(); ++i) trace += cov(i, i);
  report.eigenvalues.assign(d, 0.0);
  report.normalized.assign(d, 0.0);
  report.cumulative.assign(d, 0.0);
  if (trace <= 1e-20 * (1.0 + mean_sq_norm)) {
    report.degenerate = true;
    report.pc_id = 0;
    return report;
  }

  const auto eig = symmetric_eig(cov);
  const double scale = std::max(1.0, eig.values.front());
  const std::size_t kept = std::min(d, eig.values.size());
  for (std::size_t k = 0; k < kept; ++k) {
    double v = eig.values[k];
    if (v < 0.0) {
      if (v < -kClampTolerance * scale) {
        throw NumericError("covariance has eigenvalue " + std::to_string(v) +
                           ", which is not positive semidefinite");
      }
      v = 0.0;
    }
    report.eigenvalues[k] = v;
  }

  double total = 0.0;
  for (double v : report.eigenvalues) total += v;
  double prefix = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    prefix += report.eigenvalues[k];
    report.normalized[k] = report.eigenvalues[k] / total;
    report.cumulative[k] = prefix / total;
  }
  report.pc_id = pc_id_from_cumulative(report.cumulative);
  return report;
}

SimilarityReport cosine_matrix(const FeatureSet& fs, std::size_t max_per_class,
                               std::uint64_t seed) {
  if (max_per_class == 0) throw ConfigError("max-per-class must be >= 1");

  SimilarityReport report;
  const auto groups = fs.indices_by_class();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    std::vector<std::size_t> picks = groups[c];
    if (picks.size() > max_per_class) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(c)};
      std::mt19937_64 rng(seq);
      std::shuffle(picks.begin(), picks.end(), rng);
      picks.resize(max_per_class);
      std::sort(picks.begin(), picks.end());
    }
    ClassBlock block{static_cast<ClassId>(c), report.samples.size(), 0};
    report.samples.insert(report.samples.end(), picks.begin(), picks.end());
    block.end = report.samples.size();
    report.class_boundaries.push_back(block);
  }
  const std::size_t n = report.samples.size();
  if (n < 2) throw ConfigError("cosine matrix needs at least 2 samples");

  std::vector<double> norms(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto z = fs.sample(report.samples[a]);
    norms[a] = std::sqrt(dot(z, z));
    if (norms[a] == 0.0) {
      throw DataError("sample " + std::to_string(report.samples[a]) +
                      " has zero norm; cosine similarity is undefined");
    }
  }

  report.matrix = Matrix(n, n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const auto za = fs.sample(report.samples[a]);
      for (std::size_t b = 0; b < n; ++b) {
        report.matrix(a, b) =
            a == b ? 1.0 : dot(za, fs.sample(report.samples[b])) / (norms[a] * norms[b]);
      }
    }
  }, 64);

  double within = 0.0;
  double between = 0.0;
  std::size_t within_count = 0;
  std::size_t between_count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const ClassId ca = fs.label(report.samples[a]);
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (fs.label(report.samples[b]) == ca) {
        within += report.matrix(a, b);
        ++within_count;
      } else {
        between += report.matrix(a, b);
        ++between_count;
      }
    }
  }
  report.within_mean = within_count ? within / static_cast<double>(within_count) : 0.0;
  report.between_mean = between_count ? between / static_cast<double>(between_count) : 0.0;
  return report;
}

}  // namespace protocil
