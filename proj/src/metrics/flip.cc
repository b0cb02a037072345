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
//. See the License for the specific language governing permissions and
// limitations under the License.

#include "metrics/flip.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace miqm {

namespace {

constexpr Scalar kQc = 0.7;
constexpr Scalar kPc = 0.4;
constexpr Scalar kPt = 0.95;
constexpr Scalar kGw = 0.082;
constexpr Scalar kQf = 0.5;

constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

// Row-major linear RGB -> XYZ (D65).
const Scalar kRgbToXyz[9] = {0.41238656, 0.35759149, 0.18045049,
                             0.21263682, 0.71518298, 0.07218020,
                             0.01933062, 0.11919716, 0.95037259};

struct White {
  Scalar x, y, z;
};

White d65_white() {
  return {kRgbToXyz[0] + kRgbToXyz[1] + kRgbToXyz[2],
          kRgbToXyz[3] + kRgbToXyz[4] + kRgbToXyz[5],
          kRgbToXyz[6] + kRgbToXyz[7] + kRgbToXyz[8]};
}

// CSF component: amplitude a, width b, evaluated at x (degrees of visual
// angle), as g(x^2) = a*sqrt(pi/b)*exp(-pi^2 x^2 / b).
Scalar csf_gauss(Scalar x2, Scalar a, Scalar b) {
  return a * std::sqrt(kPi / b) * std::exp(-kPi * kPi * x2 / b);
}

// 1D factor of the separable 2D component above (amplitude square-rooted,
// exponent unchanged).
Scalar csf_gauss_sqrt(Scalar x2, Scalar a, Scalar b) {
  return std::sqrt(a * std::sqrt(kPi / b)) * std::exp(-kPi * kPi * x2 / b);
}

Scalar cielab_f_value(Scalar t) {
  constexpr Scalar kDelta = Scalar(6) / 29;
  if (t > kDelta * kDelta * kDelta) return std::cbrt(t);
  return t / (3 * kDelta * kDelta) + Scalar(4) / 29;
}

struct Lab {
  Scalar l, a, b;
};

Lab xyz_to_lab(Scalar x, Scalar y, Scalar z) {
  const White w = d65_white();
  const Scalar fx = cielab_f_value(x / w.x);
  const Scalar fy = cielab_f_value(y / w.y);
  const Scalar fz = cielab_f_value(z / w.z);
  return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

Lab hunt(const Lab& p) {
  return {p.l, Scalar(0.01) * p.l * p.a, Scalar(0.01) * p.l * p.b};
}

Scalar hyab(const Lab& a, const Lab& b) {
  return std::abs(a.l - b.l) +
         std::sqrt((a.a - b.a) * (a.a - b.a) + (a.b - b.b) * (a.b - b.b));
}

Lab linear_rgb_to_lab(Scalar r, Scalar g, Scalar b) {
  const Scalar x = kRgbToXyz[0] * r + kRgbToXyz[1] * g + kRgbToXyz[2] * b;
  const Scalar y = kRgbToXyz[3] * r + kRgbToXyz[4] * g + kRgbToXyz[5] * b;
  const Scalar z = kRgbToXyz[6] * r + kRgbToXyz[7] * g + kRgbToXyz[8] * b;
  return xyz_to_lab(x, y, z);
}

// The channel matrices in this file act on row vectors (out = in * M), so
// each constant passed to color_matrix is the transpose of the usual
// column-vector form.
Tensor shift3(Scalar a, Scalar b, Scalar c) {
  Tensor s({3});
  s[0] = a;
  s[1] = b;
  s[2] = c;
  return s;
}

Tensor ones3() { return Tensor::full({3}, 1); }

Var sep_filter(const Var& x, const std::vector<Scalar>& taps) {
  return filter1d_op(filter1d_op(x, taps, 1), taps, 0);
}

}  // namespace

FlipContext make_flip_context(Scalar ppd) {
  if (ppd <= 0) throw std::invalid_argument("flip: ppd must be positive");
  FlipContext ctx;
  ctx.ppd = ppd;

  // Spatial CSF filters. Component (a,b) pairs per opponent channel; the
  // radius covers three standard deviations of the widest component.
  const Scalar a1[3] = {1, 1, 34.1};
  const Scalar b1[3] = {0.0047, 0.0053, 0.04};
  const Scalar a2[3] = {0, 0, 13.5};
  const Scalar b2[3] = {1e-5, 1e-5, 0.025};
  const Scalar b_max = 0.04;
  const int radius = static_cast<int>(
      std::ceil(3 * std::sqrt(b_max / (2 * kPi * kPi)) * ppd));
  const Scalar delta = 1 / ppd;

  Scalar sum_y = 0, sum_cx = 0, sum_cz1 = 0, sum_cz2 = 0;
  for (int i = -radius; i <= radius; ++i) {
    const Scalar x2 = (i * delta) * (i * delta);
    ctx.csf_y.push_back(csf_gauss(x2, a1[0], b1[0]));
    ctx.csf_cx.push_back(csf_gauss(x2, a1[1], b1[1]));
    ctx.csf_cz1.push_back(csf_gauss_sqrt(x2, a1[2], b1[2]));
    ctx.csf_cz2.push_back(csf_gauss_sqrt(x2, a2[2], b2[2]));
    sum_y += ctx.csf_y.back();
    sum_cx += ctx.csf_cx.back();
    sum_cz1 += ctx.csf_cz1.back();
    sum_cz2 += ctx.csf_cz2.back();
  }
  // Y and Cx normalize to unit DC gain per axis. The two Cz components
  // share one factor so the summed 2D response has unit DC gain.
  const Scalar norm_cz = 1 / std::sqrt(sum_cz1 * sum_cz1 + sum_cz2 * sum_cz2);
  for (size_t i = 0; i < ctx.csf_y.size(); ++i) {
    ctx.csf_y[i] /= sum_y;
    ctx.csf_cx[i] /= sum_cx;
    ctx.csf_cz1[i] *= norm_cz;
    ctx.csf_cz2[i] *= norm_cz;
  }

  // Feature filters operate in pixel units.
  const Scalar sigma = Scalar(0.5) * kGw * ppd;
  const int frad = static_cast<int>(std::ceil(3 * sigma));
  Scalar gsum = 0, dpos = 0, dneg = 0, ddpos = 0, ddneg = 0;
  for (int i = -frad; i <= frad; ++i) {
    const Scalar g = std::exp(-Scalar(i) * i / (2 * sigma * sigma));
    const Scalar dg = -Scalar(i) * g;
    const Scalar ddg = (Scalar(i) * i / (sigma * sigma) - 1) * g;
    ctx.fg.push_back(g);
    ctx.fdg.push_back(dg);
    ctx.fddg.push_back(ddg);
    gsum += g;
    (dg > 0 ? dpos : dneg) += std::abs(dg);
    (ddg > 0 ? ddpos : ddneg) += std::abs(ddg);
  }
  // Positive lobes sum to 1 and negative lobes to -1 so a unit step yields
  // a unit edge response.
  for (size_t i = 0; i < ctx.fg.size(); ++i) {
    ctx.fg[i] /= gsum;
    ctx.fdg[i] /= ctx.fdg[i] > 0 ? dpos : dneg;
    ctx.fddg[i] /= ctx.fddg[i] > 0 ? ddpos : ddneg;
  }

  ctx.cmax = std::pow(
      hyab(hunt(linear_rgb_to_lab(0, 1, 0)), hunt(linear_rgb_to_lab(0, 0, 1))),
      kQc);
  return ctx;
}

ScoreWithMap flip_parts(const Var& r, const Var& d, const FlipContext& ctx) {
  if (!r.value().same_shape(d.value()) || r.value().rank() != 3 ||
      r.value().c() != 3) {
    throw std::invalid_argument("flip: inputs must be matching [H,W,3]");
  }
  const White w = d65_white();

  // sRGB -> linear -> XYZ -> YCxCz (the last two are affine and fused).
  Eigen::Matrix3d m_xyz;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m_xyz(i, j) = kRgbToXyz[i * 3 + j];
  Eigen::Matrix3d m_ycc;  // XYZ -> (Y,Cx,Cz) linear part
  m_ycc << 0, 116 / w.y, 0,
      500 / w.x, -500 / w.y, 0,
      0, 200 / w.y, -200 / w.z;
  const Eigen::Matrix3d m_rgb_to_ycc = m_ycc * m_xyz;

  auto to_ycxcz = [&](const Var& img) {
    Var lin = srgb_to_linear(img);
    Eigen::Matrix3d t = m_rgb_to_ycc.transpose();  // row-vector form
    Tensor m({3, 3});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i * 3 + j] = t(i, j);
    return channel_affine(color_matrix(lin, m), ones3(), shift3(-16, 0, 0));
  };
  Var ycc_r = to_ycxcz(r);
  Var ycc_d = to_ycxcz(d);

  // Spatial CSF filtering, then back to clamped linear RGB and on to the
  // Hunt-adjusted Lab opponent space.
  const Eigen::Matrix3d m_xyz_to_rgb = m_xyz.inverse();
  Eigen::Matrix3d m_ycc_to_xyz_lin;  // linear part of the inverse
  m_ycc_to_xyz_lin << w.x / 116, w.x / 500, 0,
      w.y / 116, 0, 0,
      w.z / 116, 0, -w.z / 200;
  const Eigen::Matrix3d m_ycc_to_rgb = m_xyz_to_rgb * m_ycc_to_xyz_lin;
  // Constant term from the +16 lightness offset.
  const Eigen::Vector3d rgb_shift =
      m_xyz_to_rgb *
      Eigen::Vector3d(16 * w.x / 116, 16 * w.y / 116, 16 * w.z / 116);

  auto filter_to_lab_hunt = [&](const Var& ycc) {
    Var y = sep_filter(slice_c(ycc, 0, 1), ctx.csf_y);
    Var cx = sep_filter(slice_c(ycc, 1, 2), ctx.csf_cx);
    Var cz_src = slice_c(ycc, 2, 3);
    Var cz = add(sep_filter(cz_src, ctx.csf_cz1),
                 sep_filter(cz_src, ctx.csf_cz2));
    Var filtered = concat_c(concat_c(y, cx), cz);

    Eigen::Matrix3d t = m_ycc_to_rgb.transpose();
    Tensor m({3, 3});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i * 3 + j] = t(i, j);
    Var rgb = clamp01(channel_affine(
        color_matrix(filtered, m), ones3(),
        shift3(rgb_shift(0), rgb_shift(1), rgb_shift(2))));

    Tensor mx({3, 3});
    Eigen::Matrix3d tx = m_xyz.transpose();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mx[i * 3 + j] = tx(i, j);
    Var xyz = color_matrix(rgb, mx);
    Var ratios = channel_affine(xyz, shift3(1 / w.x, 1 / w.y, 1 / w.z),
                                shift3(0, 0, 0));
    Var f = cielab_f(ratios);
    Tensor lab_m({3, 3});
    // rows: contribution of (fx, fy, fz) to (L, a, b)
    const Scalar lab_vals[9] = {0, 500, 0, 116, -500, 200, 0, 0, -200};
    for (int i = 0; i < 9; ++i) lab_m[i] = lab_vals[i];
    Var lab = channel_affine(color_matrix(f, lab_m), ones3(),
                             shift3(-16, 0, 0));
    Var lch = slice_c(lab, 0, 1);
    Var ha = mul_scalar(mul(lch, slice_c(lab, 1, 2)), 0.01);
    Var hb = mul_scalar(mul(lch, slice_c(lab, 2, 3)), 0.01);
    return concat_c(concat_c(lch, ha), hb);
  };

  Var lab_r = filter_to_lab_hunt(ycc_r);
  Var lab_d = filter_to_lab_hunt(ycc_d);
  Var dl = vabs(sub(slice_c(lab_r, 0, 1), slice_c(lab_d, 0, 1)));
  Var da = sub(slice_c(lab_r, 1, 2), slice_c(lab_d, 1, 2));
  Var db = sub(slice_c(lab_r, 2, 3), slice_c(lab_d, 2, 3));
  Var color_diff = pow_scalar(
      add(dl, vsqrt(add(square(da), square(db)))), kQc);

  // Redistribute: errors below pc*cmax map linearly onto [0, pt], the rest
  // onto (pt, 1].
  const Scalar pccmax = kPc * ctx.cmax;
  Var over = relu(add_scalar(color_diff, -pccmax));
  Var color_err =
      add(mul_scalar(sub(color_diff, over), kPt / pccmax),
          mul_scalar(over, (1 - kPt) / (ctx.cmax - pccmax)));

  // Feature difference on normalized achromatic values.
  auto edge_point = [&](const Var& ycc) {
    Var yn = channel_affine(slice_c(ycc, 0, 1), Tensor::full({1}, Scalar(1) / 116),
                            Tensor::full({1}, Scalar(16) / 116));
    Var dx = filter1d_op(filter1d_op(yn, ctx.fdg, 1), ctx.fg, 0);
    Var dy = filter1d_op(filter1d_op(yn, ctx.fg, 1), ctx.fdg, 0);
    Var ddx = filter1d_op(filter1d_op(yn, ctx.fddg, 1), ctx.fg, 0);
    Var ddy = filter1d_op(filter1d_op(yn, ctx.fg, 1), ctx.fddg, 0);
    Var edge = vsqrt(add(square(dx), square(dy)));
    Var point = vsqrt(add(square(ddx), square(ddy)));
    return std::pair<Var, Var>(edge, point);
  };
  auto [edge_r, point_r] = edge_point(ycc_r);
  auto [edge_d, point_d] = edge_point(ycc_d);
  Var feat = pow_scalar(
      mul_scalar(vmax(vabs(sub(edge_r, edge_d)), vabs(sub(point_r, point_d))),
                 1 / std::numbers::sqrt2_v<Scalar>),
      kQf);

  Var map = pow_vv(color_err, add_scalar(neg(feat), 1));
  return ScoreWithMap{mean_all(map), map};
}

MetricResult evaluate_flip(const Tensor& r, const Tensor& d, Scalar ppd) {
  FlipContext ctx = make_flip_context(ppd);
  ScoreWithMap p = flip_parts(Var::constant(r), Var::constant(d), ctx);
  return MetricResult{p.score.item(), p.map.value()};
}

}  // namespace miqm
