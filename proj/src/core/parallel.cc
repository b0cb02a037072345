// Copyright 2026 The miqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/parallel.h"

#include <atomic>
#include <vector>

namespace miqm {

namespace {
std::atomic<ComputeMode> g_mode{ComputeMode::kParallel};
constexpr std::int64_t kBlock = 4096;
}  // namespace

void set_compute_mode(ComputeMode mode) { g_mode.store(mode); }
ComputeMode compute_mode() { return g_mode.load(); }
bool parallel_enabled() { return g_mode.load() == ComputeMode::kParallel; }

Scalar block_sum(const Scalar* data, std::int64_t n) {
  if (n <= 0) return Scalar(0);
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks == 1) {
    Scalar s = 0;
    for (std::int64_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::vector<Scalar> partial(static_cast<size_t>(nblocks), Scalar(0));
  parallel_for(nblocks, [&](std::int64_t b) {
    const std::int64_t begin = b * kBlock;
    const std::int64_t end = begin + kBlock < n ? begin + kBlock : n;
    Scalar s = 0;
    for (std::int64_t i = begin; i < end; ++i) s += data[i];
    partial[static_cast<size_t>(b)] = s;
  });
  Scalar total = 0;
  for (std::int64_t b = 0; b < nblocks; ++b) total += partial[static_cast<size_t>(b)];
  return total;
}

}  // namespace miqm
