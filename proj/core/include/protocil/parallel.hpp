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

#include <cstddef>
#include <functional>

namespace protocil {

// Number of worker threads for internal fan-out. Reads PROTOCIL_THREADS;
// unset, empty or 0 means std::thread::hardware_concurrency().
std::size_t worker_count();

// Splits [0, n) into contiguous chunks, one per worker, and runs
// fn(begin, end) on each. Chunk boundaries depend only on n and the worker
// count, so callers that reduce per-chunk results in chunk order stay
// deterministic.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 256);

}  // namespace protocil
