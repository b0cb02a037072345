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

#ifndef MIQM_DEEP_VGG_H_
#define MIQM_DEEP_VGG_H_

#include <array>
#include <vector>

#include "autodiff/ops.h"
#include "deep/weights.h"

namespace miqm {

// VGG16 convolutional trunk. Weights come from an external manifest (see
// weights.h) and are held as constants, so gradients flow into the input
// but never into the backbone. Inputs are display-encoded RGB in [0,1];
// the standard ImageNet channel normalization is applied internally.
class Vgg16 {
 public:
  static constexpr int kNumTaps = 5;
  // Activations after the second/third ReLU of each block.
  static const std::array<const char*, kNumTaps> kTapNames;
  static const std::array<int, kNumTaps> kTapChannels;
  // The thirteen conv layers, block by block.
  static const std::array<const char*, 13> kConvNames;
  static const std::array<int, 13> kConvIn;
  static const std::array<int, 13> kConvOut;

  explicit Vgg16(const WeightManifest& manifest);

  // Returns the five tap activations, shallow to deep.
  std::vector<Var> features(const Var& rgb) const;

 private:
  std::vector<Var> w_;  // constants, [3,3,IC,OC]
  std::vector<Var> b_;  // constants, [OC]
};

// (x - mean) / std with the ImageNet statistics.
Var imagenet_normalize(const Var& rgb);

}  // namespace miqm

#endif  // MIQM_DEEP_VGG_H_
