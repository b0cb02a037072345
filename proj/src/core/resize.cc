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

#include "core/resize.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/parallel.h"

namespace miqm {

namespace {

struct FilterTap {
  int first;                   // first source index
  std::vector<Scalar> weight;  // normalized triangle weights
};

// Precomputes the triangle filter for one axis. in -> out samples; support
// max(1, in/out) implements the antialiasing on minification.
std::vector<FilterTap> build_taps(int in, int out) {
  const Scalar scale = static_cast<Scalar>(in) / out;
  const Scalar support = std::max(Scalar(1), scale);
  std::vector<FilterTap> taps(static_cast<size_t>(out));
  for (int o = 0; o < out; ++o) {
    const Scalar center = (o + Scalar(0.5)) * scale - Scalar(0.5);
    int lo = static_cast<int>(std::floor(center - support + 1));
    int hi = static_cast<int>(std::floor(center + support));
    FilterTap& t = taps[static_cast<size_t>(o)];
    t.first = lo;
    Scalar total = 0;
    for (int i = lo; i <= hi; ++i) {
      const Scalar d = std::abs((i - center) / support);
      const Scalar w = d < 1 ? 1 - d : 0;
      t.weight.push_back(w);
      total += w;
    }
    for (Scalar& w : t.weight) w /= total;
  }
  return taps;
}

inline int clampi(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Resamples along x (axis=1) or y (axis=0) with precomputed taps.
Tensor resample_axis(const Tensor& img, const std::vector<FilterTap>& taps,
                     int axis) {
  const int h = img.h(), w = img.w(), c = img.c();
  const int out_len = static_cast<int>(taps.size());
  Tensor out = axis == 1 ? Tensor::hwc(h, out_len, c) : Tensor::hwc(out_len, w, c);
  if (axis == 1) {
    parallel_for(h, [&](std::int64_t y) {
      for (int o = 0; o < out_len; ++o) {
        const FilterTap& t = taps[static_cast<size_t>(o)];
        for (int ch = 0; ch < c; ++ch) {
          Scalar acc = 0;
          for (size_t k = 0; k < t.weight.size(); ++k) {
            const int sx = clampi(t.first + static_cast<int>(k), 0, w - 1);
            acc += t.weight[k] * img.at(static_cast<int>(y), sx, ch);
          }
          out.at(static_cast<int>(y), o, ch) = acc;
        }
      }
    });
  } else {
    parallel_for(out_len, [&](std::int64_t o) {
      const FilterTap& t = taps[static_cast<size_t>(o)];
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < c; ++ch) {
          Scalar acc = 0;
          for (size_t k = 0; k < t.weight.size(); ++k) {
            const int sy = clampi(t.first + static_cast<int>(k), 0, h - 1);
            acc += t.weight[k] * img.at(sy, x, ch);
          }
          out.at(static_cast<int>(o), x, ch) = acc;
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor resize_bilinear(const Tensor& img, int out_h, int out_w) {
  if (img.rank() != 3) {
    throw std::invalid_argument("resize_bilinear: rank-3 input expected");
  }
  if (out_h <= 0 || out_w <= 0) {
    throw std::invalid_argument("resize_bilinear: bad output size");
  }
  if (out_h == img.h() && out_w == img.w()) return img;
  Tensor tmp = out_w == img.w() ? img : resample_axis(img, build_taps(img.w(), out_w), 1);
  return out_h == img.h() ? tmp : resample_axis(tmp, build_taps(img.h(), out_h), 0);
}

Tensor resize_short_side(const Tensor& img, int short_side) {
  const int h = img.h(), w = img.w();
  const int cur_short = std::min(h, w);
  if (cur_short == short_side) return img;
  const Scalar r = static_cast<Scalar>(short_side) / cur_short;
  int nh, nw;
  if (h <= w) {
    nh = short_side;
    nw = static_cast<int>(std::lround(w * r));
  } else {
    nw = short_side;
    nh = static_cast<int>(std::lround(h * r));
  }
  return resize_bilinear(img, nh, nw);
}

}  // namespace miqm
