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

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "protocil/diagnostics.hpp"
#include "protocil/harness.hpp"
#include "protocil/ipc.hpp"

namespace protocil {
namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

// Loss gradient for a 128-sample batch; args: classes, dim.
void BM_LossGradient(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix feats = gaussian(128, d, 1);
  LabeledRows batch;
  for (std::size_t k = 0; k < 128; ++k) batch.push_back(k, static_cast<ClassId>(k % c));
  const PrototypeClassifier clf(gaussian(c, d, 2), c / 2, 1.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(clf, batch.view(feats)));
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_LossGradient)->Args({10, 64})->Args({100, 512})->Args({100, 2048});

void BM_Predict(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const PrototypeClassifier clf(gaussian(c, 512, 3), c, 1.0, 0.3);
  const Matrix z = gaussian(1, 512, 4);
  for (auto _ : state) benchmark::DoNotOptimize(predict(clf, z.row(0)));
}
BENCHMARK(BM_Predict)->Arg(10)->Arg(100);

void BM_SymmetricEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix g = gaussian(n, n, 5);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g(i, j) + g(j, i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eig(a));
}
BENCHMARK(BM_SymmetricEig)->Arg(30)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Herding(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix f = gaussian(n, 512, 6);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(herding_select(f, rows, 20));
}
BENCHMARK(BM_Herding)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace protocil

// The packaged benchmark_main archive carries LTO bytecode from another
// compiler release, so the entry point is defined here.
BENCHMARK_MAIN();
