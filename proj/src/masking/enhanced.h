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

#ifndef MIQM_MASKING_ENHANCED_H_
#define MIQM_MASKING_ENHANCED_H_

#include <memory>
#include <string>
#include <vector>

#include "deep/deep_metrics.h"
#include "masking/mask_generator.h"
#include "metrics/classic.h"
#include "metrics/flip.h"

namespace miqm {

// A base metric composed with learned per-pixel masks:
//  - pixel metrics (mae/psnr/ssim/flip): one generator on the RGB pair,
//    masks multiply both input images;
//  - ms-ssim: one generator shared across the five scales, applied to the
//    downsampled RGB pair of each scale;
//  - feature metrics: one generator per backbone tap on the raw feature
//    pair. vgg-l1 and dists mask the raw features (dists leaves the image
//    stage untouched); lpips masks the unit-normalized features, which is
//    where masking before normalization would cancel out.
class EnhancedMetric {
 public:
  // deep is required for feature metrics and ignored otherwise.
  EnhancedMetric(MetricId id, std::shared_ptr<const DeepContext> deep,
                 std::uint64_t init_seed, Scalar flip_ppd = kFlipDefaultPpd);

  MetricId metric() const { return id_; }
  std::uint64_t init_seed() const { return init_seed_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  // One name per generator: "image", "shared", or the backbone tap names.
  const std::vector<std::string>& generator_names() const { return names_; }
  int num_generators() const { return static_cast<int>(gens_.size()); }

  // Differentiable graph pieces. ref/dist are [H,W,3] nodes.
  struct Graph {
    Var score;
    Var map;                 // invalid when the base metric has no map
    std::vector<Var> masks;  // one per generator application
  };
  Graph build(const Var& ref, const Var& dist) const;

  // Forward-only evaluation (applies the PSNR reporting cap).
  struct Result {
    Scalar score = 0;
    Tensor error_map;           // empty when absent
    std::vector<Tensor> masks;  // [H,W,1] each
  };
  Result evaluate(const Tensor& ref, const Tensor& dist) const;

  // Saturates every generator so the enhanced metric reproduces its base.
  void force_identity();

 private:
  MetricId id_;
  std::uint64_t init_seed_;
  std::shared_ptr<const DeepContext> deep_;
  FlipContext flip_ctx_;
  ParamStore store_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<MaskGenerator>> gens_;
};

// Training objective for one sample: (scaler(score) - mos)^2, mos in [0,1].
Var enhanced_training_loss(const EnhancedMetric& em, const ScalerNetwork& s,
                           const Var& ref, const Var& dist, Scalar mos);

}  // namespace miqm

#endif  // MIQM_MASKING_ENHANCED_H_
