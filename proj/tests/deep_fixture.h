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

// Deterministic random-weight backbone fixture. The same hash-derived
// values are reproduced by oracles/deep_reference.py, so full metric
// scores can be pinned against an independent implementation without
// shipping weight blobs.

#ifndef MIQM_TESTS_DEEP_FIXTURE_H_
#define MIQM_TESTS_DEEP_FIXTURE_H_

#include <cmath>
#include <filesystem>
#include <map>
#include <string>

#include "deep/vgg.h"
#include "deep/weights.h"
#include "synth_images.h"

namespace miqm_test {

constexpr std::uint32_t kFixtureSalt = 77;

inline miqm::Tensor hash_tensor(const std::vector<int>& shape,
                                std::uint32_t cfield, miqm::Scalar lo,
                                miqm::Scalar hi) {
  miqm::Tensor t(shape);
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    const miqm::Scalar u = noise01(static_cast<int>(i & 0xFFFF),
                                   static_cast<int>(i >> 16),
                                   static_cast<int>(cfield), kFixtureSalt);
    t[i] = lo + (hi - lo) * u;
  }
  return t;
}

// Writes the full fixture (backbone + lpips + dists weights) and returns
// the manifest path. Regenerated on every call; cheap and deterministic.
inline std::string write_vgg_fixture(const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, miqm::Tensor> tensors;
  for (int l = 0; l < 13; ++l) {
    const int ic = miqm::Vgg16::kConvIn[l];
    const int oc = miqm::Vgg16::kConvOut[l];
    // He-style range keeps activation magnitudes near unity through the
    // thirteen ReLU layers.
    const miqm::Scalar a = std::sqrt(6.0 / (9.0 * ic));
    tensors[std::string(miqm::Vgg16::kConvNames[l]) + ".w"] =
        hash_tensor({3, 3, ic, oc}, 100 + l, -a, a);
    tensors[std::string(miqm::Vgg16::kConvNames[l]) + ".b"] =
        hash_tensor({oc}, 200 + l, -0.05, 0.05);
  }
  for (int t = 0; t < miqm::Vgg16::kNumTaps; ++t) {
    const int c = miqm::Vgg16::kTapChannels[t];
    tensors["lpips_lin" + std::to_string(t) + ".w"] =
        hash_tensor({c}, 300 + t, 0.2 / c, 1.0 / c);
  }
  int total_c = 3;
  for (int t = 0; t < miqm::Vgg16::kNumTaps; ++t) {
    total_c += miqm::Vgg16::kTapChannels[t];
  }
  tensors["dists.alpha"] = hash_tensor({total_c}, 400, 0.2, 1.0);
  tensors["dists.beta"] = hash_tensor({total_c}, 401, 0.2, 1.0);
  miqm::write_weight_manifest(dir, "manifest.json", tensors);
  return dir + "/manifest.json";
}

// Backbone-only variant (no lpips/dists weights), for fallback tests.
inline std::string write_vgg_fixture_bare(const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, miqm::Tensor> tensors;
  for (int l = 0; l < 13; ++l) {
    const int ic = miqm::Vgg16::kConvIn[l];
    const int oc = miqm::Vgg16::kConvOut[l];
    const miqm::Scalar a = std::sqrt(6.0 / (9.0 * ic));
    tensors[std::string(miqm::Vgg16::kConvNames[l]) + ".w"] =
        hash_tensor({3, 3, ic, oc}, 100 + l, -a, a);
    tensors[std::string(miqm::Vgg16::kConvNames[l]) + ".b"] =
        hash_tensor({oc}, 200 + l, -0.05, 0.05);
  }
  miqm::write_weight_manifest(dir, "manifest.json", tensors);
  return dir + "/manifest.json";
}

}  // namespace miqm_test

#endif  // MIQM_TESTS_DEEP_FIXTURE_H_
