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

#ifndef MIQM_DEEP_DEEP_METRICS_H_
#define MIQM_DEEP_DEEP_METRICS_H_

#include <memory>
#include <string>
#include <vector>

#include "deep/vgg.h"
#include "deep/weights.h"
#include "metrics/common.h"

namespace miqm {

// Backbone plus the per-channel weights of the feature metrics. The LPIPS
// linear weights (lpips_lin0.w .. lpips_lin4.w) and the DISTS stage weights
// (dists.alpha / dists.beta, flat over all stages) are optional in the
// manifest; when absent, uniform weights are substituted so the metrics
// stay usable with a bare backbone.
struct DeepContext {
  std::shared_ptr<Vgg16> vgg;
  std::vector<Tensor> lpips_w;                 // per tap, [C_l]
  std::vector<Tensor> dists_alpha, dists_beta; // per stage (6), [C_s]
  bool lpips_weights_loaded = false;
  bool dists_weights_loaded = false;

  static DeepContext load(const std::string& manifest_path);
};

// Channels of the DISTS stages: the input image plus the five taps.
std::vector<int> dists_stage_channels();

// Graph-level pieces, shared by plain evaluation and the mask-enhanced
// compositions (which insert masks between feature extraction and these).

// Sum over taps of the mean absolute feature difference.
Var vgg_l1_score(const std::vector<Var>& fr, const std::vector<Var>& fd);
// Channel-mean |difference| of the first tap -> [H,W,1].
Var vgg_l1_map(const Var& fr0, const Var& fd0);

// Per-pixel unit normalization over channels (eps 1e-10).
Var lpips_normalize(const Var& f);
// Inputs are unit-normalized taps. Sum over taps of the spatial mean of the
// weighted squared difference.
Var lpips_score(const DeepContext& ctx, const std::vector<Var>& nr,
                const std::vector<Var>& nd);
// Weighted squared difference of the first normalized tap -> [H,W,1].
Var lpips_map(const DeepContext& ctx, const Var& nr0, const Var& nd0);

// stages = input image followed by the five taps (6 entries each).
Var dists_score(const DeepContext& ctx, const std::vector<Var>& stages_r,
                const std::vector<Var>& stages_d);

// Plain (unmasked) evaluation for kVggL1, kLpips, kDists.
MetricResult evaluate_deep(const DeepContext& ctx, MetricId id,
                           const Tensor& ref, const Tensor& dist);

}  // namespace miqm

#endif  // MIQM_DEEP_DEEP_METRICS_H_
