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

#ifndef MIQM_MASKING_MASK_GENERATOR_H_
#define MIQM_MASKING_MASK_GENERATOR_H_

#include <string>

#include "nn/layers.h"

namespace miqm {

// Bias that saturates the output sigmoid, turning the generator into an
// (almost exact) identity mask.
constexpr Scalar kIdentityBias = 20.0;
constexpr int kMaskHidden = 64;

// Per-pixel visual-masking weight map. Consumes the channel-concatenated
// reference/distorted pair and emits a sigmoid mask in (0,1):
// three 3x3/64 ReLU convs followed by a 3x3/1 conv + sigmoid.
class MaskGenerator {
 public:
  // Registers parameters under "<prefix>.conv{1..4}". feat_channels is the
  // channel count of ONE input (the first conv sees twice that).
  MaskGenerator(ParamStore& store, const std::string& prefix,
                int feat_channels, Rng& rng);

  // ref/dist: [H,W,C] -> mask [H,W,1].
  Var forward(const Var& ref, const Var& dist) const;

  // Saturates the output so the mask is 1 up to sigmoid rounding; the
  // enhanced metric then reproduces its base metric.
  void force_identity();

  int feat_channels() const { return feat_channels_; }

 private:
  int feat_channels_;
  Conv2dLayer c1_, c2_, c3_, c4_;
};

// Maps a raw metric score to a normalized opinion score in (0,1). Used only
// while training mask generators; never part of metric evaluation.
// 1 -> 32 -> 32 -> 1 dense layers (ReLU, ReLU, sigmoid).
class ScalerNetwork {
 public:
  ScalerNetwork(ParamStore& store, const std::string& prefix, Rng& rng);
  Var forward(const Var& score) const;  // [1] -> [1]

 private:
  DenseLayer d1_, d2_, d3_;
};

}  // namespace miqm

#endif  // MIQM_MASKING_MASK_GENERATOR_H_
