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

#include "metrics/common.h"

#include <cmath>

namespace miqm {

const char* metric_name(MetricId id) {
  switch (id) {
    case MetricId::kMae: return "mae";
    case MetricId::kPsnr: return "psnr";
    case MetricId::kSsim: return "ssim";
    case MetricId::kMsSsim: return "ms-ssim";
    case MetricId::kFlip: return "flip";
    case MetricId::kVggL1: return "vgg-l1";
    case MetricId::kLpips: return "lpips";
    case MetricId::kDists: return "dists";
  }
  return "?";
}

std::optional<MetricId> metric_from_name(const std::string& name) {
  for (MetricId id : all_metrics()) {
    if (name == metric_name(id)) return id;
  }
  return std::nullopt;
}

std::vector<MetricId> all_metrics() {
  return {MetricId::kMae,  MetricId::kPsnr,  MetricId::kSsim,
          MetricId::kMsSsim, MetricId::kFlip, MetricId::kVggL1,
          MetricId::kLpips, MetricId::kDists};
}

bool metric_higher_better(MetricId id) {
  return id == MetricId::kPsnr || id == MetricId::kSsim ||
         id == MetricId::kMsSsim;
}

bool metric_uses_features(MetricId id) {
  return id == MetricId::kVggL1 || id == MetricId::kLpips ||
         id == MetricId::kDists;
}

bool metric_has_map(MetricId id) {
  return id != MetricId::kMsSsim && id != MetricId::kDists;
}

Var luma709(const Var& rgb) {
  Tensor m({3, 1});
  m[0] = 0.2126;
  m[1] = 0.7152;
  m[2] = 0.0722;
  return color_matrix(rgb, m);
}

std::vector<Scalar> gaussian_taps(Scalar sigma, int radius) {
  std::vector<Scalar> taps(static_cast<size_t>(2 * radius + 1));
  Scalar total = 0;
  for (int i = -radius; i <= radius; ++i) {
    const Scalar v = std::exp(-Scalar(i) * i / (2 * sigma * sigma));
    taps[static_cast<size_t>(i + radius)] = v;
    total += v;
  }
  for (Scalar& v : taps) v /= total;
  return taps;
}

Var interior_mean(const Var& map, int crop) {
  const int h = map.value().h(), w = map.value().w();
  if (h <= 2 * crop || w <= 2 * crop) return mean_all(map);
  Tensor weights = Tensor::hwc(h, w, 1);
  const Scalar count =
      static_cast<Scalar>(h - 2 * crop) * static_cast<Scalar>(w - 2 * crop);
  for (int y = crop; y < h - crop; ++y)
    for (int x = crop; x < w - crop; ++x) weights.at(y, x, 0) = 1 / count;
  return sum_all(mul(map, Var::constant(std::move(weights))));
}

}  // namespace miqm
