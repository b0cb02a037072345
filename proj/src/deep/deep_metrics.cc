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

#include "deep/deep_metrics.h"

#include <stdexcept>
#include <string>

namespace miqm {
namespace {

constexpr Scalar kStatEps = 1e-6;   // stabilizer in the DISTS statistics
constexpr Scalar kNormEps = 1e-10;  // added to the channel norm

void check_pair(const Tensor& ref, const Tensor& dist) {
  if (ref.rank() != 3 || ref.c() != 3) {
    throw std::invalid_argument("feature metrics expect [H,W,3] inputs");
  }
  if (!ref.same_shape(dist)) {
    throw std::invalid_argument("reference/distorted shape mismatch: " +
                                ref.shape_str() + " vs " + dist.shape_str());
  }
  if (ref.h() < 16 || ref.w() < 16) {
    throw std::invalid_argument(
        "feature metrics need at least 16x16 inputs (four pooling stages)");
  }
}

Tensor uniform_weights(int c, Scalar value) {
  Tensor t({c});
  for (int i = 0; i < c; ++i) t[i] = value;
  return t;
}

// Mean over channels as a [C,1] matrix so the result is a per-pixel map.
Tensor channel_mean_matrix(int c) {
  Tensor m({c, 1});
  for (int i = 0; i < c; ++i) m[i] = 1.0 / c;
  return m;
}

Tensor column_matrix(const Tensor& w) {
  Tensor m({w.dim(0), 1});
  for (int i = 0; i < w.dim(0); ++i) m[i] = w[i];
  return m;
}

}  // namespace

std::vector<int> dists_stage_channels() {
  std::vector<int> c = {3};
  for (int i = 0; i < Vgg16::kNumTaps; ++i) c.push_back(Vgg16::kTapChannels[i]);
  return c;
}

DeepContext DeepContext::load(const std::string& manifest_path) {
  const WeightManifest manifest = WeightManifest::load(manifest_path);
  DeepContext ctx;
  ctx.vgg = std::make_shared<Vgg16>(manifest);

  ctx.lpips_weights_loaded = true;
  for (int i = 0; i < Vgg16::kNumTaps; ++i) {
    if (!manifest.has("lpips_lin" + std::to_string(i) + ".w")) {
      ctx.lpips_weights_loaded = false;
      break;
    }
  }
  for (int i = 0; i < Vgg16::kNumTaps; ++i) {
    const int c = Vgg16::kTapChannels[i];
    if (ctx.lpips_weights_loaded) {
      Tensor w = manifest.tensor("lpips_lin" + std::to_string(i) + ".w");
      if (w.shape() != std::vector<int>{c}) {
        throw std::runtime_error("lpips_lin" + std::to_string(i) +
                                 ".w: unexpected shape " + w.shape_str());
      }
      ctx.lpips_w.push_back(std::move(w));
    } else {
      ctx.lpips_w.push_back(uniform_weights(c, 1.0 / c));
    }
  }

  const std::vector<int> stage_c = dists_stage_channels();
  std::int64_t total_c = 0;
  for (int c : stage_c) total_c += c;
  ctx.dists_weights_loaded =
      manifest.has("dists.alpha") && manifest.has("dists.beta");
  if (ctx.dists_weights_loaded) {
    Tensor alpha = manifest.tensor("dists.alpha");
    Tensor beta = manifest.tensor("dists.beta");
    if (alpha.numel() != total_c || beta.numel() != total_c) {
      throw std::runtime_error("dists.alpha/beta: expected " +
                               std::to_string(total_c) + " weights");
    }
    // The published model normalizes by the joint sum at inference time.
    Scalar total = 0;
    for (std::int64_t i = 0; i < total_c; ++i) total += alpha[i] + beta[i];
    if (total <= 0) throw std::runtime_error("dists weights sum to zero");
    std::int64_t off = 0;
    for (int c : stage_c) {
      Tensor a({c}), b({c});
      for (int i = 0; i < c; ++i) {
        a[i] = alpha[off + i] / total;
        b[i] = beta[off + i] / total;
      }
      off += c;
      ctx.dists_alpha.push_back(std::move(a));
      ctx.dists_beta.push_back(std::move(b));
    }
  } else {
    const Scalar w = 1.0 / (2.0 * static_cast<Scalar>(total_c));
    for (int c : stage_c) {
      ctx.dists_alpha.push_back(uniform_weights(c, w));
      ctx.dists_beta.push_back(uniform_weights(c, w));
    }
  }
  return ctx;
}

Var vgg_l1_score(const std::vector<Var>& fr, const std::vector<Var>& fd) {
  Var total = scalar_const(0.0);
  for (size_t l = 0; l < fr.size(); ++l) {
    total = total + mean_all(vabs(sub(fr[l], fd[l])));
  }
  return total;
}

Var vgg_l1_map(const Var& fr0, const Var& fd0) {
  const int c = fr0.value().c();
  return color_matrix(vabs(sub(fr0, fd0)), channel_mean_matrix(c));
}

Var lpips_normalize(const Var& f) {
  const Var norm = channel_l2norm(f);
  const Var recip = pow_scalar(add_scalar(norm, kNormEps), -1.0);
  return mul_mask(f, recip);
}

Var lpips_score(const DeepContext& ctx, const std::vector<Var>& nr,
                const std::vector<Var>& nd) {
  Var total = scalar_const(0.0);
  for (size_t l = 0; l < nr.size(); ++l) {
    // Weighted channel sum, then spatial mean.
    const Var d2 = square(sub(nr[l], nd[l]));
    total = total + mean_all(color_matrix(d2, column_matrix(ctx.lpips_w[l])));
  }
  return total;
}

Var lpips_map(const DeepContext& ctx, const Var& nr0, const Var& nd0) {
  const Var d2 = square(sub(nr0, nd0));
  return color_matrix(d2, column_matrix(ctx.lpips_w[0]));
}

Var dists_score(const DeepContext& ctx, const std::vector<Var>& stages_r,
                const std::vector<Var>& stages_d) {
  if (stages_r.size() != ctx.dists_alpha.size()) {
    throw std::invalid_argument("dists_score: wrong stage count");
  }
  Var total = scalar_const(0.0);
  for (size_t s = 0; s < stages_r.size(); ++s) {
    const Var& x = stages_r[s];
    const Var& y = stages_d[s];
    const Var mx = channel_mean(x);
    const Var my = channel_mean(y);
    const Var vx = sub(channel_mean(square(x)), square(mx));
    const Var vy = sub(channel_mean(square(y)), square(my));
    const Var cxy = sub(channel_mean(mul(x, y)), mul(mx, my));
    const Var lum = div(add_scalar(mul_scalar(mul(mx, my), 2.0), kStatEps),
                        add_scalar(add(square(mx), square(my)), kStatEps));
    const Var str = div(add_scalar(mul_scalar(cxy, 2.0), kStatEps),
                        add_scalar(add(vx, vy), kStatEps));
    const Var a = Var::constant(ctx.dists_alpha[s]);
    const Var b = Var::constant(ctx.dists_beta[s]);
    total = total + sum_all(add(mul(a, lum), mul(b, str)));
  }
  return add_scalar(neg(total), 1.0);
}

MetricResult evaluate_deep(const DeepContext& ctx, MetricId id,
                           const Tensor& ref, const Tensor& dist) {
  check_pair(ref, dist);
  const Var r = Var::constant(ref);
  const Var d = Var::constant(dist);
  const std::vector<Var> fr = ctx.vgg->features(r);
  const std::vector<Var> fd = ctx.vgg->features(d);
  MetricResult out;
  switch (id) {
    case MetricId::kVggL1:
      out.score = vgg_l1_score(fr, fd).item();
      out.error_map = vgg_l1_map(fr[0], fd[0]).value();
      break;
    case MetricId::kLpips: {
      std::vector<Var> nr, nd;
      for (int l = 0; l < Vgg16::kNumTaps; ++l) {
        nr.push_back(lpips_normalize(fr[l]));
        nd.push_back(lpips_normalize(fd[l]));
      }
      out.score = lpips_score(ctx, nr, nd).item();
      out.error_map = lpips_map(ctx, nr[0], nd[0]).value();
      break;
    }
    case MetricId::kDists: {
      std::vector<Var> sr = {r}, sd = {d};
      for (int l = 0; l < Vgg16::kNumTaps; ++l) {
        sr.push_back(fr[l]);
        sd.push_back(fd[l]);
      }
      out.score = dists_score(ctx, sr, sd).item();
      break;
    }
    default:
      throw std::invalid_argument("evaluate_deep: not a feature metric");
  }
  return out;
}

}  // namespace miqm
