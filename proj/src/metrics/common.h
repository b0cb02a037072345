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

#ifndef MIQM_METRICS_COMMON_H_
#define MIQM_METRICS_COMMON_H_

#include <optional>
#include <string>
#include <vector>

#include "autodiff/ops.h"

namespace miqm {

enum class MetricId {
  kMae,
  kPsnr,
  kSsim,
  kMsSsim,
  kFlip,
  kVggL1,
  kLpips,
  kDists,
};

// Canonical CLI names: mae, psnr, ssim, ms-ssim, flip, vgg-l1, lpips, dists.
const char* metric_name(MetricId id);
std::optional<MetricId> metric_from_name(const std::string& name);
std::vector<MetricId> all_metrics();

// True when larger scores mean better quality (psnr, ssim, ms-ssim).
bool metric_higher_better(MetricId id);
// True for metrics operating on backbone feature pyramids.
bool metric_uses_features(MetricId id);
// True when the metric produces a per-pixel error map.
bool metric_has_map(MetricId id);

// Forward evaluation output. error_map is [H,W,1], oriented so larger
// values mean larger local error; empty for metrics without a map.
struct MetricResult {
  Scalar score = 0;
  Tensor error_map;
};

// Differentiable score plus optional map node.
struct ScoreWithMap {
  Var score;
  Var map;  // invalid Var when absent
};

// Rec.709 luma of display-encoded RGB -> [H,W,1].
Var luma709(const Var& rgb);

// Normalized Gaussian taps for radius r (length 2r+1).
std::vector<Scalar> gaussian_taps(Scalar sigma, int radius);

// Mean over the map with `crop` pixels of border excluded (all of it when
// the interior would be empty). map is [H,W,1].
Var interior_mean(const Var& map, int crop);

}  // namespace miqm

#endif  // MIQM_METRICS_COMMON_H_
