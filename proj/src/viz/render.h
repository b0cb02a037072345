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
//
// Error-map and mask renderers. Conventions:
//   - error maps use the repo's dark-to-bright ramp; darker = lower error
//   - masks render as grayscale, 0 = black (insensitive), 1 = white
//   - unbounded error values are squashed by 2*sigmoid(k*x) - 1; the slope
//     is usually picked so the map's 95th percentile lands at 0.9
//   - every render writes a .json sidecar next to the image recording the
//     colormap and normalization constants
// Rendering is pure: the same inputs always produce byte-identical files.

#ifndef MIQM_VIZ_RENDER_H_
#define MIQM_VIZ_RENDER_H_

#include <string>
#include <vector>

#include "core/tensor.h"
#include "masking/enhanced.h"
#include "metrics/common.h"

namespace miqm {

enum class Normalization { kNone, kSigmoid };

struct RenderSpec {
  std::string colormap = "magma";
  Normalization normalization = Normalization::kNone;
  Scalar sigmoid_k = 1.0;  // must be > 0 when normalization is kSigmoid
  std::string out_path;
};

// Nearest-rank percentile of all entries; p in [0,1].
Scalar percentile(const Tensor& map, Scalar p);

// Slope that maps x95 to 0.9 under 2*sigmoid(k*x) - 1, i.e. ln(19) / x95.
// Degenerate (non-positive) x95 falls back to slope 1.
Scalar sigmoid_slope_for_p95(Scalar x95);

// Applies the spec's normalization to one value; result clamped to [0,1].
Scalar normalize_value(Scalar x, const RenderSpec& spec);

// Renders result.error_map per the spec; throws std::invalid_argument when
// the metric produced no map. Returns the image path.
std::string render_error_map(const MetricResult& result,
                             const RenderSpec& spec);

// Grayscale mask render. mask is [H,W] or [H,W,C]; channels are averaged.
std::string render_mask(const Tensor& mask, const RenderSpec& spec);

// Re-runs the mask model on contrast-scaled copies of (ref, dist) —
// scaled about mid-gray and clipped — and renders the first mask of each.
// Writes spec.out_path with "_x<factor>" inserted before the extension;
// returns the written paths in factor order.
std::vector<std::string> contrast_sweep(
    const EnhancedMetric& em, const Tensor& ref, const Tensor& dist,
    const RenderSpec& spec,
    const std::vector<Scalar>& factors = {0.5, 1.0, 2.0});

// Contrast scaling used by the sweep: 0.5 + f*(x - 0.5), clipped to [0,1].
Tensor scale_contrast(const Tensor& img, Scalar factor);

}  // namespace miqm

#endif  // MIQM_VIZ_RENDER_H_
