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

#include "nn/layers.h"

#include <cmath>
#include <stdexcept>

namespace miqm {

Var ParamStore::add(const std::string& name, Tensor init, bool decay) {
  for (const Param& p : params_) {
    if (p.name == name) {
      throw std::invalid_argument("ParamStore: duplicate parameter " + name);
    }
  }
  Var v = Var::leaf(std::move(init));
  params_.push_back(Param{name, v, decay});
  return v;
}

Param* ParamStore::find(const std::string& name) {
  for (Param& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void ParamStore::zero_grad() {
  for (Param& p : params_) p.var.zero_grad();
}

std::int64_t ParamStore::total_params() const {
  std::int64_t n = 0;
  for (const Param& p : params_) n += p.var.value().numel();
  return n;
}

namespace {

Tensor uniform_init(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(fan_in));
  for (std::int64_t i = 0; i < t.numel(); ++i)
    t[i] = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

Conv2dLayer::Conv2dLayer(ParamStore& store, const std::string& prefix, int kh,
                         int kw, int ic, int oc, Rng& rng) {
  w_ = store.add(prefix + ".w", uniform_init({kh, kw, ic, oc}, kh * kw * ic, rng),
                 /*decay=*/true);
  b_ = store.add(prefix + ".b", Tensor({oc}), /*decay=*/false);
}

DenseLayer::DenseLayer(ParamStore& store, const std::string& prefix, int in,
                       int out, Rng& rng) {
  w_ = store.add(prefix + ".w", uniform_init({in, out}, in, rng),
                 /*decay=*/true);
  b_ = store.add(prefix + ".b", Tensor({out}), /*decay=*/false);
}

}  // namespace miqm
