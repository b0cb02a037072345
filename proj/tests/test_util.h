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

#ifndef MIQM_TESTS_TEST_UTIL_H_
#define MIQM_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "autodiff/graph.h"
#include "core/rng.h"
#include "core/tensor.h"

namespace miqm_test {

using miqm::Rng;
using miqm::Scalar;
using miqm::Tensor;
using miqm::Var;

inline Tensor random_tensor(std::vector<int> shape, Rng& rng, Scalar lo = -1,
                            Scalar hi = 1) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

inline Scalar max_rel_diff(const Tensor& a, const Tensor& b) {
  Scalar worst = 0;
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    const Scalar denom = std::max({std::abs(a[i]), std::abs(b[i]), Scalar(1)});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Central-difference gradient check. builder() must rebuild the scalar loss
// graph from the current leaf values. Returns the worst relative error over
// `probes` randomly chosen leaf elements.
inline Scalar fd_check(std::vector<Var>& leaves,
                       const std::function<Var()>& builder, Rng& rng,
                       int probes = 30, Scalar eps = 1e-6) {
  for (Var& l : leaves) l.zero_grad();
  Var loss = builder();
  miqm::backward(loss);
  std::vector<Tensor> grads;
  grads.reserve(leaves.size());
  for (Var& l : leaves) grads.push_back(l.grad());

  Scalar worst = 0;
  for (int p = 0; p < probes; ++p) {
    const int li = static_cast<int>(rng.uniform_int(leaves.size()));
    Tensor& val = leaves[static_cast<size_t>(li)].mutable_value();
    const std::int64_t i =
        static_cast<std::int64_t>(rng.uniform_int(
            static_cast<std::uint64_t>(val.numel())));
    const Scalar saved = val[i];
    val[i] = saved + eps;
    const Scalar fp = builder().item();
    val[i] = saved - eps;
    const Scalar fm = builder().item();
    val[i] = saved;
    const Scalar fd = (fp - fm) / (2 * eps);
    const Scalar ad = grads[static_cast<size_t>(li)].empty()
                          ? Scalar(0)
                          : grads[static_cast<size_t>(li)][i];
    const Scalar denom = std::max({std::abs(fd), std::abs(ad), Scalar(1e-6)});
    worst = std::max(worst, std::abs(fd - ad) / denom);
  }
  return worst;
}

}  // namespace miqm_test

#endif  // MIQM_TESTS_TEST_UTIL_H_
