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

#include "protocil/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "protocil/error.hpp"

namespace protocil {

std::string_view to_string(LrSchedule schedule) {
  return schedule == LrSchedule::kCosine ? "cosine" : "constant";
}

LrSchedule parse_lr_schedule(std::string_view text) {
  if (text == "cosine") return LrSchedule::kCosine;
  if (text == "constant") return LrSchedule::kConstant;
  throw ConfigError("lr schedule must be 'cosine' or 'constant', got '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1), got " + std::to_string(momentum));
  }
}

double learning_rate_at(const TrainConfig& cfg, std::size_t epoch) {
  if (cfg.lr_schedule == LrSchedule::kConstant) return cfg.learning_rate;
  const double progress = static_cast<double>(epoch) / static_cast<double>(cfg.epochs);
  return cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void MomentumSgd::step(std::span<double> params, std::span<const double> grad, double lr) {
  for (std::size_t k = 0; k < params.size(); ++k) {
    velocity_[k] = momentum_ * velocity_[k] + grad[k];
    params[k] -= lr * velocity_[k];
  }
}

void run_minibatches(std::size_t n, const TrainConfig& cfg,
                     const std::function<void(std::span<const std::size_t>, double)>& step,
                     const std::function<void(std::size_t)>& on_epoch_end) {
  cfg.validate();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    const auto order = epoch_order(n, cfg.seed, epoch);
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      step(std::span<const std::size_t>(order).subspan(begin, end - begin), lr);
    }
    if (on_epoch_end) on_epoch_end(epoch);
  }
}

}  // namespace protocil
