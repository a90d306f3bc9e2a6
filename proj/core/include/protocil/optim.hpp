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
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace protocil {

enum class LrSchedule { kConstant, kCosine };

std::string_view to_string(LrSchedule schedule);
LrSchedule parse_lr_schedule(std::string_view text);

// Minibatch SGD settings shared by the prototype classifier and the linear
// baselines. Defaults follow the usual CIL protocol: lr 0.1, momentum 0.9,
// cosine decay, batch 128, 160 epochs per phase.
struct TrainConfig {
  std::size_t epochs = 160;
  std::size_t batch_size = 128;
  double learning_rate = 0.1;
  double momentum = 0.9;
  LrSchedule lr_schedule = LrSchedule::kCosine;
  std::uint64_t seed = 0;

  void validate() const;
};

// Step size used throughout `epoch` (0-based). Cosine decays from the base
// rate towards 0 at `cfg.epochs`.
double learning_rate_at(const TrainConfig& cfg, std::size_t epoch);

// Sample visiting order for one epoch; a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

// Heavy-ball momentum in the PyTorch convention: v <- mu*v + g; p <- p - lr*v.
class MomentumSgd {
 public:
  MomentumSgd(std::size_t parameter_count, double momentum)
      : velocity_(parameter_count, 0.0), momentum_(momentum) {}

  void step(std::span<double> params, std::span<const double> grad, double lr);

 private:
  std::vector<double> velocity_;
  double momentum_;
};

// Drives `cfg.epochs` passes over n samples in shuffled minibatches and calls
// step(batch_indices, lr) for each batch. The last batch of an epoch may be
// short. `on_epoch_end(epoch)` runs after every epoch if set.
void run_minibatches(std::size_t n, const TrainConfig& cfg,
                     const std::function<void(std::span<const std::size_t>, double)>& step,
                     const std::function<void(std::size_t)>& on_epoch_end = {});

}  // namespace protocil
