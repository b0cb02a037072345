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

#ifndef MIQM_METRICS_CLASSIC_H_
#define MIQM_METRICS_CLASSIC_H_

#include <array>

#include "metrics/common.h"

namespace miqm {

// PSNR scores are capped here when reported (identical inputs would be
// unbounded otherwise).
constexpr Scalar kPsnrCap = 100;

// Mean absolute error; map is the channel-mean absolute difference.
ScoreWithMap mae_parts(const Var& r, const Var& d);

// PSNR in dB for data range 1; map is the channel-mean squared error.
// The graph score is uncapped; evaluate_classic applies kPsnrCap.
ScoreWithMap psnr_parts(const Var& r, const Var& d);

// Single-scale SSIM on Rec.709 luma, 11x11 Gaussian window sigma 1.5.
// score is the mean over the window-radius-cropped interior (the canonical
// valid-window score); map is full-size 1 - SSIM.
ScoreWithMap ssim_parts(const Var& r, const Var& d);

// Per-scale SSIM terms on luma inputs: cs (contrast-structure) and l
// (luminance), both interior-cropped means.
struct SsimScaleTerms {
  Var cs;
  Var l;
};
SsimScaleTerms ssim_scale_terms(const Var& r_luma, const Var& d_luma);

constexpr int kMsSsimScales = 5;
extern const std::array<Scalar, kMsSsimScales> kMsSsimWeights;
// Smallest input side accepted by ms-ssim (11-tap window at 1/16 scale).
constexpr int kMsSsimMinSide = 176;

// Multi-scale SSIM, 5 scales, 2x2 mean-pool between scales. No map.
Var ms_ssim_score(const Var& r, const Var& d);

// Forward-only evaluation for the non-feature metrics (flip has its own
// entry point taking pixels-per-degree).
MetricResult evaluate_classic(MetricId id, const Tensor& r, const Tensor& d);

}  // namespace miqm

#endif  // MIQM_METRICS_CLASSIC_H_
