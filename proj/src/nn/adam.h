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

#ifndef MIQM_NN_ADAM_H_
#define MIQM_NN_ADAM_H_

#include <cstdint>
#include <map>
#include <string>

#include "nn/layers.h"

namespace miqm {

struct AdamConfig {
  Scalar lr = 1e-4;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar eps = 1e-8;
  // Decoupled weight decay; applied only to params with decay == true.
  Scalar weight_decay = 1e-6;
};

// Adam with decoupled weight decay. State tensors (first/second moments)
// are keyed by parameter name so checkpoints can restore them for exact
// training resumption.
class AdamW {
 public:
  AdamW(ParamStore& store, AdamConfig cfg);

  // Applies one update from the gradients currently held in the leaves.
  void step();

  std::int64_t step_count() const { return t_; }
  void set_step_count(std::int64_t t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }

  // Moment access for checkpointing: "m.<param>" / "v.<param>".
  std::map<std::string, Tensor>& moments() { return moments_; }

 private:
  ParamStore& store_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::map<std::string, Tensor> moments_;
};

}  // namespace miqm

#endif  // MIQM_NN_ADAM_H_
