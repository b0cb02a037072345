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

#include "masking/enhanced.h"

#include <stdexcept>

namespace miqm {
namespace {

constexpr Scalar kMsSsimFloor = 1e-6;

void check_inputs(MetricId id, const Tensor& ref, const Tensor& dist) {
  if (ref.rank() != 3 || ref.c() != 3) {
    throw std::invalid_argument("enhanced metric expects [H,W,3] inputs");
  }
  if (!ref.same_shape(dist)) {
    throw std::invalid_argument("reference/distorted shape mismatch: " +
                                ref.shape_str() + " vs " + dist.shape_str());
  }
  if (metric_uses_features(id) && (ref.h() < 16 || ref.w() < 16)) {
    throw std::invalid_argument(
        "feature metrics need at least 16x16 inputs (four pooling stages)");
  }
}

}  // namespace

EnhancedMetric::EnhancedMetric(MetricId id,
                               std::shared_ptr<const DeepContext> deep,
                               std::uint64_t init_seed, Scalar flip_ppd)
    : id_(id), init_seed_(init_seed), deep_(std::move(deep)) {
  if (metric_uses_features(id_)) {
    if (!deep_) {
      throw std::invalid_argument(
          "feature metric enhancement needs a backbone context");
    }
    for (int t = 0; t < Vgg16::kNumTaps; ++t) {
      names_.emplace_back(Vgg16::kTapNames[t]);
    }
  } else if (id_ == MetricId::kMsSsim) {
    names_ = {"shared"};
  } else {
    names_ = {"image"};
  }
  if (id_ == MetricId::kFlip) flip_ctx_ = make_flip_context(flip_ppd);

  for (size_t g = 0; g < names_.size(); ++g) {
    const int feat_c =
        metric_uses_features(id_) ? Vgg16::kTapChannels[g] : 3;
    // One dedicated init stream per generator keeps parameter draws
    // independent of construction order elsewhere.
    Rng rng = Rng::stream(init_seed_, 1000 + static_cast<std::uint64_t>(g));
    gens_.push_back(std::make_unique<MaskGenerator>(
        store_, "g." + names_[g], feat_c, rng));
  }
}

void EnhancedMetric::force_identity() {
  for (auto& g : gens_) g->force_identity();
}

EnhancedMetric::Graph EnhancedMetric::build(const Var& ref,
                                            const Var& dist) const {
  Graph out;
  switch (id_) {
    case MetricId::kMae:
    case MetricId::kPsnr:
    case MetricId::kSsim:
    case MetricId::kFlip: {
      const Var m = gens_[0]->forward(ref, dist);
      const Var mr = mul_mask(ref, m);
      const Var md = mul_mask(dist, m);
      ScoreWithMap parts;
      if (id_ == MetricId::kMae) parts = mae_parts(mr, md);
      if (id_ == MetricId::kPsnr) parts = psnr_parts(mr, md);
      if (id_ == MetricId::kSsim) parts = ssim_parts(mr, md);
      if (id_ == MetricId::kFlip) parts = flip_parts(mr, md, flip_ctx_);
      out.score = parts.score;
      out.map = parts.map;
      out.masks = {m};
      break;
    }
    case MetricId::kMsSsim: {
      // Mirrors ms_ssim_score, with the shared generator masking the
      // (progressively downsampled) RGB pair of every scale.
      if (std::min(ref.value().h(), ref.value().w()) < kMsSsimMinSide) {
        throw std::invalid_argument("ms-ssim: input side below minimum");
      }
      Var rr = ref;
      Var dd = dist;
      Var floor_c = Var::constant(Tensor::full({1}, kMsSsimFloor));
      Var score;
      for (int s = 0; s < kMsSsimScales; ++s) {
        if (s > 0) {
          rr = avgpool2_op(rr);
          dd = avgpool2_op(dd);
        }
        const Var m = gens_[0]->forward(rr, dd);
        out.masks.push_back(m);
        const Var mr = mul_mask(rr, m);
        const Var md = mul_mask(dd, m);
        SsimScaleTerms t = ssim_scale_terms(luma709(mr), luma709(md));
        Var term = pow_scalar(vmax(t.cs, floor_c), kMsSsimWeights[s]);
        score = s == 0 ? term : mul(score, term);
        if (s == kMsSsimScales - 1) {
          score =
              mul(score, pow_scalar(vmax(t.l, floor_c), kMsSsimWeights[s]));
        }
      }
      out.score = score;
      break;
    }
    case MetricId::kVggL1:
    case MetricId::kLpips:
    case MetricId::kDists: {
      const std::vector<Var> fr = deep_->vgg->features(ref);
      const std::vector<Var> fd = deep_->vgg->features(dist);
      for (int t = 0; t < Vgg16::kNumTaps; ++t) {
        out.masks.push_back(gens_[t]->forward(fr[t], fd[t]));
      }
      if (id_ == MetricId::kVggL1) {
        std::vector<Var> mr, md;
        for (int t = 0; t < Vgg16::kNumTaps; ++t) {
          mr.push_back(mul_mask(fr[t], out.masks[t]));
          md.push_back(mul_mask(fd[t], out.masks[t]));
        }
        out.score = vgg_l1_score(mr, md);
        out.map = vgg_l1_map(mr[0], md[0]);
      } else if (id_ == MetricId::kLpips) {
        std::vector<Var> mr, md;
        for (int t = 0; t < Vgg16::kNumTaps; ++t) {
          mr.push_back(mul_mask(lpips_normalize(fr[t]), out.masks[t]));
          md.push_back(mul_mask(lpips_normalize(fd[t]), out.masks[t]));
        }
        out.score = lpips_score(*deep_, mr, md);
        out.map = lpips_map(*deep_, mr[0], md[0]);
      } else {
        std::vector<Var> sr = {ref}, sd = {dist};
        for (int t = 0; t < Vgg16::kNumTaps; ++t) {
          sr.push_back(mul_mask(fr[t], out.masks[t]));
          sd.push_back(mul_mask(fd[t], out.masks[t]));
        }
        out.score = dists_score(*deep_, sr, sd);
      }
      break;
    }
  }
  return out;
}

EnhancedMetric::Result EnhancedMetric::evaluate(const Tensor& ref,
                                                const Tensor& dist) const {
  check_inputs(id_, ref, dist);
  const Graph g = build(Var::constant(ref), Var::constant(dist));
  Result out;
  out.score = g.score.item();
  if (id_ == MetricId::kPsnr) out.score = std::min(out.score, kPsnrCap);
  if (g.map.valid()) out.error_map = g.map.value();
  out.masks.reserve(g.masks.size());
  for (const Var& m : g.masks) out.masks.push_back(m.value());
  return out;
}

Var enhanced_training_loss(const EnhancedMetric& em, const ScalerNetwork& s,
                           const Var& ref, const Var& dist, Scalar mos) {
  const Var pred = s.forward(em.build(ref, dist).score);
  return square(sub(pred, scalar_const(mos)));
}

}  // namespace miqm
