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

#ifndef MIQM_METRICS_FLIP_H_
#define MIQM_METRICS_FLIP_H_

#include <vector>

#include "metrics/common.h"

namespace miqm {

// Low-dynamic-range perceptual difference driven by a contrast sensitivity
// model and edge/point feature detection. Inputs are display-encoded sRGB
// in [0,1]; scores and maps live in [0,1], lower is better.

constexpr Scalar kFlipDefaultPpd = 67;

// Precomputed 1D filter banks and constants for a given pixels-per-degree.
struct FlipContext {
  Scalar ppd = 0;
  // CSF filters (spatial), one pair per opponent axis; the blue-yellow
  // response is the sum of two separable components.
  std::vector<Scalar> csf_y, csf_cx, csf_cz1, csf_cz2;
  // Feature filters: Gaussian, first and second derivative taps.
  std::vector<Scalar> fg, fdg, fddg;
  Scalar cmax = 0;  // largest attainable color difference, already ^qc
};

FlipContext make_flip_context(Scalar ppd);

// Full differentiable pipeline; map is [H,W,1], score its mean.
ScoreWithMap flip_parts(const Var& r, const Var& d, const FlipContext& ctx);

MetricResult evaluate_flip(const Tensor& r, const Tensor& d,
                           Scalar ppd = kFlipDefaultPpd);

}  // namespace miqm

#endif  // MIQM_METRICS_FLIP_H_
