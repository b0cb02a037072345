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

#include "masking/mask_generator.h"

namespace miqm {

MaskGenerator::MaskGenerator(ParamStore& store, const std::string& prefix,
                             int feat_channels, Rng& rng)
    : feat_channels_(feat_channels),
      c1_(store, prefix + ".conv1", 3, 3, 2 * feat_channels, kMaskHidden, rng),
      c2_(store, prefix + ".conv2", 3, 3, kMaskHidden, kMaskHidden, rng),
      c3_(store, prefix + ".conv3", 3, 3, kMaskHidden, kMaskHidden, rng),
      c4_(store, prefix + ".conv4", 3, 3, kMaskHidden, 1, rng) {}

Var MaskGenerator::forward(const Var& ref, const Var& dist) const {
  Var x = concat_c(ref, dist);
  x = relu(c1_.forward(x));
  x = relu(c2_.forward(x));
  x = relu(c3_.forward(x));
  return sigmoid(c4_.forward(x));
}

void MaskGenerator::force_identity() {
  Var b = c4_.b();  // shares the parameter node
  b.mutable_value()[0] = kIdentityBias;
}

ScalerNetwork::ScalerNetwork(ParamStore& store, const std::string& prefix,
                             Rng& rng)
    : d1_(store, prefix + ".fc1", 1, 32, rng),
      d2_(store, prefix + ".fc2", 32, 32, rng),
      d3_(store, prefix + ".fc3", 32, 1, rng) {}

Var ScalerNetwork::forward(const Var& score) const {
  Var x = relu(d1_.forward(score));
  x = relu(d2_.forward(x));
  return sigmoid(d3_.forward(x));
}

}  // namespace miqm
