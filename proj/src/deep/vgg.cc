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

#include "deep/vgg.h"

#include <stdexcept>
#include <string>

namespace miqm {

const std::array<const char*, Vgg16::kNumTaps> Vgg16::kTapNames = {
    "relu1_2", "relu2_2", "relu3_3", "relu4_3", "relu5_3"};
const std::array<int, Vgg16::kNumTaps> Vgg16::kTapChannels = {64, 128, 256,
                                                              512, 512};

const std::array<const char*, 13> Vgg16::kConvNames = {
    "conv1_1", "conv1_2", "conv2_1", "conv2_2", "conv3_1", "conv3_2",
    "conv3_3", "conv4_1", "conv4_2", "conv4_3", "conv5_1", "conv5_2",
    "conv5_3"};
const std::array<int, 13> Vgg16::kConvIn = {3,   64,  64,  128, 128, 256, 256,
                                            256, 512, 512, 512, 512, 512};
const std::array<int, 13> Vgg16::kConvOut = {64,  64,  128, 128, 256, 256, 256,
                                             512, 512, 512, 512, 512, 512};

Vgg16::Vgg16(const WeightManifest& manifest) {
  w_.reserve(13);
  b_.reserve(13);
  for (int i = 0; i < 13; ++i) {
    const std::string name = kConvNames[i];
    Tensor w = manifest.tensor(name + ".w");
    Tensor b = manifest.tensor(name + ".b");
    const std::vector<int> want = {3, 3, kConvIn[i], kConvOut[i]};
    if (w.shape() != want) {
      throw std::runtime_error(name + ".w: unexpected shape " + w.shape_str());
    }
    if (b.shape() != std::vector<int>{kConvOut[i]}) {
      throw std::runtime_error(name + ".b: unexpected shape " + b.shape_str());
    }
    w_.push_back(Var::constant(std::move(w)));
    b_.push_back(Var::constant(std::move(b)));
  }
}

Var imagenet_normalize(const Var& rgb) {
  static const Scalar mean[3] = {0.485, 0.456, 0.406};
  static const Scalar stdev[3] = {0.229, 0.224, 0.225};
  Tensor gain({3}), bias({3});
  for (int c = 0; c < 3; ++c) {
    gain[c] = 1.0 / stdev[c];
    bias[c] = -mean[c] / stdev[c];
  }
  return channel_affine(rgb, gain, bias);
}

std::vector<Var> Vgg16::features(const Var& rgb) const {
  if (rgb.value().rank() != 3 || rgb.value().c() != 3) {
    throw std::invalid_argument("Vgg16: input must be [H,W,3]");
  }
  Var x = imagenet_normalize(rgb);
  std::vector<Var> taps;
  taps.reserve(kNumTaps);
  // Blocks of 2,2,3,3,3 convs; a tap after the last ReLU of each block,
  // a 2x2 max pool between blocks.
  static const int kBlockSizes[5] = {2, 2, 3, 3, 3};
  int conv = 0;
  for (int block = 0; block < 5; ++block) {
    for (int i = 0; i < kBlockSizes[block]; ++i, ++conv) {
      x = relu(conv2d_op(x, w_[conv], b_[conv]));
    }
    taps.push_back(x);
    if (block + 1 < 5) x = maxpool2_op(x);
  }
  return taps;
}

}  // namespace miqm
