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

#include "metrics/classic.h"

#include <cmath>
#include <stdexcept>

namespace miqm {

namespace {

constexpr Scalar kC1 = 0.01 * 0.01;
constexpr Scalar kC2 = 0.03 * 0.03;
constexpr int kSsimRadius = 5;  // 11-tap window
constexpr Scalar kSsimSigma = 1.5;
// Guards the fractional powers in the multi-scale product against the rare
// non-positive contrast term.
constexpr Scalar kMsSsimFloor = 1e-6;

Var channel_mean_map(const Var& x) {
  const int c = x.value().c();
  Tensor m({c, 1});
  for (int i = 0; i < c; ++i) m[i] = Scalar(1) / c;
  return color_matrix(x, m);
}

Var gauss_blur(const Var& x, const std::vector<Scalar>& taps) {
  return filter1d_op(filter1d_op(x, taps, 0), taps, 1);
}

struct SsimMaps {
  Var sim;  // full-size similarity map
};

SsimMaps ssim_map_from_luma(const Var& rl, const Var& dl) {
  const std::vector<Scalar> taps = gaussian_taps(kSsimSigma, kSsimRadius);
  Var mu_r = gauss_blur(rl, taps);
  Var mu_d = gauss_blur(dl, taps);
  Var mu_rr = gauss_blur(mul(rl, rl), taps);
  Var mu_dd = gauss_blur(mul(dl, dl), taps);
  Var mu_rd = gauss_blur(mul(rl, dl), taps);
  Var var_r = sub(mu_rr, mul(mu_r, mu_r));
  Var var_d = sub(mu_dd, mul(mu_d, mu_d));
  Var cov = sub(mu_rd, mul(mu_r, mu_d));
  Var num = mul(add_scalar(mul_scalar(mul(mu_r, mu_d), 2), kC1),
                add_scalar(mul_scalar(cov, 2), kC2));
  Var den = mul(add_scalar(add(mul(mu_r, mu_r), mul(mu_d, mu_d)), kC1),
                add_scalar(add(var_r, var_d), kC2));
  return SsimMaps{div(num, den)};
}

}  // namespace

ScoreWithMap mae_parts(const Var& r, const Var& d) {
  Var ad = vabs(sub(r, d));
  return ScoreWithMap{mean_all(ad), channel_mean_map(ad)};
}

ScoreWithMap psnr_parts(const Var& r, const Var& d) {
  Var sq = square(sub(r, d));
  Var mse = mean_all(sq);
  // 10*log10(1/mse) = -10/ln(10) * ln(mse)
  Var score = mul_scalar(vlog(mse), Scalar(-10) / std::log(Scalar(10)));
  return ScoreWithMap{score, channel_mean_map(sq)};
}

ScoreWithMap ssim_parts(const Var& r, const Var& d) {
  SsimMaps maps = ssim_map_from_luma(luma709(r), luma709(d));
  Var score = interior_mean(maps.sim, kSsimRadius);
  Var err = add_scalar(neg(maps.sim), 1);
  return ScoreWithMap{score, err};
}

SsimScaleTerms ssim_scale_terms(const Var& rl, const Var& dl) {
  const std::vector<Scalar> taps = gaussian_taps(kSsimSigma, kSsimRadius);
  Var mu_r = gauss_blur(rl, taps);
  Var mu_d = gauss_blur(dl, taps);
  Var mu_rr = gauss_blur(mul(rl, rl), taps);
  Var mu_dd = gauss_blur(mul(dl, dl), taps);
  Var mu_rd = gauss_blur(mul(rl, dl), taps);
  Var var_r = sub(mu_rr, mul(mu_r, mu_r));
  Var var_d = sub(mu_dd, mul(mu_d, mu_d));
  Var cov = sub(mu_rd, mul(mu_r, mu_d));
  Var cs_map = div(add_scalar(mul_scalar(cov, 2), kC2),
                   add_scalar(add(var_r, var_d), kC2));
  Var l_map = div(add_scalar(mul_scalar(mul(mu_r, mu_d), 2), kC1),
                  add_scalar(add(mul(mu_r, mu_r), mul(mu_d, mu_d)), kC1));
  return SsimScaleTerms{interior_mean(cs_map, kSsimRadius),
                        interior_mean(l_map, kSsimRadius)};
}

const std::array<Scalar, kMsSsimScales> kMsSsimWeights = {
    0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

Var ms_ssim_score(const Var& r, const Var& d) {
  if (std::min(r.value().h(), r.value().w()) < kMsSsimMinSide) {
    throw std::invalid_argument("ms-ssim: input side below minimum");
  }
  Var rl = luma709(r);
  Var dl = luma709(d);
  Var floor_c = Var::constant(Tensor::full({1}, kMsSsimFloor));
  Var score;
  for (int s = 0; s < kMsSsimScales; ++s) {
    if (s > 0) {
      rl = avgpool2_op(rl);
      dl = avgpool2_op(dl);
    }
    SsimScaleTerms t = ssim_scale_terms(rl, dl);
    Var term = pow_scalar(vmax(t.cs, floor_c), kMsSsimWeights[s]);
    score = s == 0 ? term : mul(score, term);
    if (s == kMsSsimScales - 1) {
      score = mul(score, pow_scalar(vmax(t.l, floor_c), kMsSsimWeights[s]));
    }
  }
  return score;
}

MetricResult evaluate_classic(MetricId id, const Tensor& r, const Tensor& d) {
  if (!r.same_shape(d)) {
    throw std::invalid_argument("metric inputs must share a shape, got " +
                                r.shape_str() + " vs " + d.shape_str());
  }
  Var rv = Var::constant(r);
  Var dv = Var::constant(d);
  switch (id) {
    case MetricId::kMae: {
      ScoreWithMap p = mae_parts(rv, dv);
      return MetricResult{p.score.item(), p.map.value()};
    }
    case MetricId::kPsnr: {
      ScoreWithMap p = psnr_parts(rv, dv);
      Scalar s = p.score.item();
      if (!std::isfinite(s) || s > kPsnrCap) s = kPsnrCap;
      return MetricResult{s, p.map.value()};
    }
    case MetricId::kSsim: {
      ScoreWithMap p = ssim_parts(rv, dv);
      return MetricResult{p.score.item(), p.map.value()};
    }
    case MetricId::kMsSsim: {
      return MetricResult{ms_ssim_score(rv, dv).item(), Tensor()};
    }
    default:
      throw std::invalid_argument(
          "evaluate_classic: metric requires its own entry point");
  }
}

}  // namespace miqm
