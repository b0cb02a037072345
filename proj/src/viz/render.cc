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

#include "viz/render.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "core/image_io.h"
#include "viz/colormap.h"

namespace miqm {

namespace {

void check_spec(const RenderSpec& spec) {
  if (spec.out_path.empty()) {
    throw std::invalid_argument("render: empty output path");
  }
  if (spec.normalization == Normalization::kSigmoid && spec.sigmoid_k <= 0) {
    throw std::invalid_argument("render: sigmoid slope must be positive");
  }
}

const char* normalization_name(Normalization n) {
  return n == Normalization::kSigmoid ? "sigmoid" : "none";
}

// Sidecar so a reader can invert the mapping without rerunning the tool.
void write_sidecar(const RenderSpec& spec, const char* kind,
                   const Tensor& raw) {
  Scalar lo = 0, hi = 0;
  if (raw.numel() > 0) {
    const Scalar* d = raw.data();
    lo = hi = d[0];
    for (std::int64_t i = 1; i < raw.numel(); ++i) {
      lo = std::min(lo, d[i]);
      hi = std::max(hi, d[i]);
    }
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "{\n  \"kind\": \"%s\",\n  \"colormap\": \"%s\",\n"
                "  \"normalization\": \"%s\",\n  \"sigmoid_k\": %.17g,\n"
                "  \"input_min\": %.17g,\n  \"input_max\": %.17g\n}\n",
                kind, spec.colormap.c_str(),
                normalization_name(spec.normalization), spec.sigmoid_k, lo,
                hi);
  std::ofstream out(spec.out_path + ".json", std::ios::binary);
  if (!out) {
    throw std::runtime_error("render: cannot write " + spec.out_path +
                             ".json");
  }
  out << buf;
}

// [H,W] or [H,W,C] -> [H,W] channel mean.
Tensor spatial_mean(const Tensor& t) {
  if (t.rank() == 2) return t;
  if (t.rank() != 3) {
    throw std::invalid_argument("render: map must be rank 2 or 3");
  }
  const int h = t.h(), w = t.w(), c = t.c();
  Tensor out({h, w});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Scalar s = 0;
      for (int ch = 0; ch < c; ++ch) s += t.at(y, x, ch);
      out.data()[static_cast<std::int64_t>(y) * w + x] = s / c;
    }
  }
  return out;
}

Tensor normalize_map(const Tensor& map, const RenderSpec& spec) {
  Tensor out = map;
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    out.data()[i] = normalize_value(out.data()[i], spec);
  }
  return out;
}

std::string insert_suffix(const std::string& path,
                          const std::string& suffix) {
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

Scalar percentile(const Tensor& map, Scalar p) {
  if (map.numel() == 0) {
    throw std::invalid_argument("percentile: empty map");
  }
  p = std::clamp(p, Scalar(0), Scalar(1));
  std::vector<Scalar> v(map.data(), map.data() + map.numel());
  std::sort(v.begin(), v.end());
  const std::int64_t n = map.numel();
  const std::int64_t rank = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(p * static_cast<double>(n))));
  return v[rank - 1];
}

Scalar sigmoid_slope_for_p95(Scalar x95) {
  if (!(x95 > 0)) return 1.0;
  return std::log(Scalar(19)) / x95;
}

Scalar normalize_value(Scalar x, const RenderSpec& spec) {
  if (spec.normalization == Normalization::kSigmoid) {
    // 2*sigmoid(k*x) - 1, written with the stable branch for large |t|.
    const Scalar t = spec.sigmoid_k * x;
    x = t >= 0 ? (1 - std::exp(-t)) / (1 + std::exp(-t))
               : (std::exp(t) - 1) / (std::exp(t) + 1);
  }
  return std::clamp(x, Scalar(0), Scalar(1));
}

std::string render_error_map(const MetricResult& result,
                             const RenderSpec& spec) {
  check_spec(spec);
  if (result.error_map.numel() == 0) {
    throw std::invalid_argument(
        "render_error_map: metric produced no error map");
  }
  const Tensor flat = spatial_mean(result.error_map);
  const Tensor rgb = apply_colormap(normalize_map(flat, spec),
                                    spec.colormap);
  write_png(spec.out_path, rgb);
  write_sidecar(spec, "error_map", flat);
  return spec.out_path;
}

std::string render_mask(const Tensor& mask, const RenderSpec& spec) {
  check_spec(spec);
  if (mask.numel() == 0) {
    throw std::invalid_argument("render_mask: empty mask");
  }
  const Tensor flat = spatial_mean(mask);
  const Tensor rgb = apply_colormap(normalize_map(flat, spec), "gray");
  write_png(spec.out_path, rgb);
  write_sidecar(spec, "mask", flat);
  return spec.out_path;
}

Tensor scale_contrast(const Tensor& img, Scalar factor) {
  Tensor out = img;
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    out.data()[i] = std::clamp<Scalar>(0.5 + factor * (img.data()[i] - 0.5),
                                       0, 1);
  }
  return out;
}

std::vector<std::string> contrast_sweep(const EnhancedMetric& em,
                                        const Tensor& ref,
                                        const Tensor& dist,
                                        const RenderSpec& spec,
                                        const std::vector<Scalar>& factors) {
  check_spec(spec);
  std::vector<std::string> paths;
  for (const Scalar f : factors) {
    const EnhancedMetric::Result r =
        em.evaluate(scale_contrast(ref, f), scale_contrast(dist, f));
    if (r.masks.empty()) {
      throw std::runtime_error("contrast_sweep: model produced no masks");
    }
    char tag[32];
    std::snprintf(tag, sizeof(tag), "_x%g", f);
    RenderSpec one = spec;
    one.out_path = insert_suffix(spec.out_path, tag);
    paths.push_back(render_mask(r.masks.front(), one));
  }
  return paths;
}

}  // namespace miqm
