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

#ifndef MIQM_CORE_PARALLEL_H_
#define MIQM_CORE_PARALLEL_H_

#include <cstdint>

#include "core/tensor.h"

namespace miqm {

// Every kernel has a serial reference path and an OpenMP path. The two
// must produce bit-identical results: per-element work uses a fixed inner
// summation order, and full reductions sum fixed-size blocks so the result
// does not depend on the thread count.
enum class ComputeMode { kSerial, kParallel };

void set_compute_mode(ComputeMode mode);
ComputeMode compute_mode();
bool parallel_enabled();

// Runs fn(i) for i in [0, n). Guarantees nothing about ordering; fn must
// write to disjoint locations per index.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
  }
}

// Deterministic sum: parallel partial sums over fixed 4096-element blocks,
// then a serial pass over the block results in index order.
Scalar block_sum(const Scalar* data, std::int64_t n);

inline Scalar block_mean(const Scalar* data, std::int64_t n) {
  return n > 0 ? block_sum(data, n) / static_cast<Scalar>(n) : Scalar(0);
}

}  // namespace miqm

#endif  // MIQM_CORE_PARALLEL_H_
