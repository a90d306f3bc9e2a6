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
#include <vector>

#include "protocil/featureset.hpp"
#include "protocil/matrix.hpp"

namespace protocil {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i is the unit eigenvector of values[i]
  int sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix. Stops once the off-diagonal
// Frobenius norm falls below 1e-12 * ||m||_F; throws NumericError after 100
// sweeps without convergence. Throws ConfigError if `m` is not square,
// asymmetric beyond 1e-8 (relative), or holds non-finite entries.
EigenDecomposition symmetric_eig(const Matrix& m);

// PC-ID threshold on the cumulative explained variance.
inline constexpr double kPcIdThreshold = 0.9;

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending, numerical negatives clamped to 0
  std::vector<double> normalized;   // eigenvalue / sum
  std::vector<double> cumulative;   // cumulative[k-1] = P(k)
  std::size_t pc_id = 0;            // min k with P(k) >= 0.9; 0 for zero covariance
  std::size_t dim = 0;
  std::size_t samples = 0;
  bool normalized_features = false;
  bool degenerate = false;  // zero covariance: all samples identical
  bool used_gram = false;   // spectrum computed from the n x n Gram matrix
};

// Spectrum of the sample covariance (divisor n - 1) of the pooled features,
// optionally after L2-normalizing every sample. When n <= dim the nonzero
// spectrum comes from the centered Gram matrix and the rest is zero.
SpectrumReport covariance_spectrum(const FeatureSet& fs, bool normalize_features);

// Smallest k with cumulative[k-1] >= threshold. A relative slack of 1e-12
// absorbs rounding in the prefix sums (equal eigenvalues hit 0.9 exactly in
// exact arithmetic).
std::size_t pc_id_from_cumulative(const std::vector<double>& cumulative,
                                  double threshold = kPcIdThreshold);

struct ClassBlock {
  ClassId label = 0;
  std::size_t begin = 0;  // row range [begin, end) in the matrix
  std::size_t end = 0;
};

struct SimilarityReport {
  Matrix matrix;                    // n x n cosine similarities, rows sorted by class
  std::vector<std::size_t> samples; // FeatureSet index of each row
  std::vector<ClassBlock> class_boundaries;
  double within_mean = 0.0;   // mean over same-class off-diagonal entries
  double between_mean = 0.0;  // mean over different-class entries
};

// Pairwise cosine similarities of up to `max_per_class` samples per class
// (seeded subsample when a class has more), arranged class by class.
SimilarityReport cosine_matrix(const FeatureSet& fs, std::size_t max_per_class,
                               std::uint64_t seed = 0);

}  // namespace protocil
