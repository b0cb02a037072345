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

#ifndef MIQM_NN_LAYERS_H_
#define MIQM_NN_LAYERS_H_

#include <string>
#include <vector>

#include "autodiff/graph.h"
#include "autodiff/ops.h"
#include "core/rng.h"

namespace miqm {

// A named trainable leaf. decay marks parameters subject to weight decay
// (kernel weights yes, biases no).
struct Param {
  std::string name;
  Var var;
  bool decay = true;
};

// Registry of trainable parameters for one model. Owns nothing heavy; the
// Vars share their nodes with whoever built them. Names must be unique and
// are the keys used by checkpoints and the optimizer state.
class ParamStore {
 public:
  Var add(const std::string& name, Tensor init, bool decay);
  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  Param* find(const std::string& name);
  void zero_grad();
  std::int64_t total_params() const;

 private:
  std::vector<Param> params_;
};

// 2D convolution layer, zero-pad same, stride 1. Weights init uniform in
// [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
class Conv2dLayer {
 public:
  Conv2dLayer(ParamStore& store, const std::string& prefix, int kh, int kw,
              int ic, int oc, Rng& rng);
  Var forward(const Var& x) const { return conv2d_op(x, w_, b_); }
  const Var& w() const { return w_; }
  const Var& b() const { return b_; }

 private:
  Var w_, b_;
};

// Fully connected layer over flat vectors. Same init scheme.
class DenseLayer {
 public:
  DenseLayer(ParamStore& store, const std::string& prefix, int in, int out,
             Rng& rng);
  Var forward(const Var& x) const { return dense(x, w_, b_); }

 private:
  Var w_, b_;
};

}  // namespace miqm

#endif  // MIQM_NN_LAYERS_H_
