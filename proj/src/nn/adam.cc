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

#include "nn/adam.h"

#include <cmath>

#include "core/parallel.h"

namespace miqm {

AdamW::AdamW(ParamStore& store, AdamConfig cfg) : store_(store), cfg_(cfg) {
  for (const Param& p : store_.params()) {
    moments_.emplace("m." + p.name, Tensor(p.var.value().shape()));
    moments_.emplace("v." + p.name, Tensor(p.var.value().shape()));
  }
}

void AdamW::step() {
  ++t_;
  const Scalar bc1 = Scalar(1) - std::pow(cfg_.beta1, static_cast<Scalar>(t_));
  const Scalar bc2 = Scalar(1) - std::pow(cfg_.beta2, static_cast<Scalar>(t_));
  for (Param& p : store_.params()) {
    Tensor& theta = p.var.mutable_value();
    const Tensor& g = p.var.grad();
    if (g.empty()) continue;  // parameter unused in this graph
    Tensor& m = moments_.at("m." + p.name);
    Tensor& v = moments_.at("v." + p.name);
    const Scalar lr = cfg_.lr;
    const Scalar b1 = cfg_.beta1, b2 = cfg_.beta2, eps = cfg_.eps;
    const Scalar wd = p.decay ? cfg_.weight_decay : Scalar(0);
    parallel_for(theta.numel(), [&](std::int64_t i) {
      const Scalar gi = g[i];
      m[i] = b1 * m[i] + (1 - b1) * gi;
      v[i] = b2 * v[i] + (1 - b2) * gi * gi;
      const Scalar mhat = m[i] / bc1;
      const Scalar vhat = v[i] / bc2;
      theta[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * theta[i]);
    });
  }
}

}  // namespace miqm
