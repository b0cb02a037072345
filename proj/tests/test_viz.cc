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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/image_io.h"
#include "core/rng.h"
#include "core/sha256.h"
#include "doctest.h"
#include "json.hpp"
#include "metrics/classic.h"
#include "synth_images.h"
#include "viz/colormap.h"
#include "viz/render.h"

using miqm::MetricResult;
using miqm::Normalization;
using miqm::RenderSpec;
using miqm::Scalar;
using miqm::Tensor;

namespace fs = std::filesystem;

namespace {

int byte_of(Scalar v) { return static_cast<int>(std::lround(v * 255.0)); }

RenderSpec spec_to(const std::string& path) {
  RenderSpec s;
  s.out_path = path;
  return s;
}

}  // namespace

TEST_CASE("percentile uses nearest rank") {
  Tensor t({1, 100});
  for (int i = 0; i < 100; ++i) t.data()[i] = (i + 1) / 100.0;
  CHECK(miqm::percentile(t, 0.95) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(miqm::percentile(t, 1.0) == 1.0);
  CHECK(miqm::percentile(t, 0.0) == 0.01);  // rank floors at 1
  Tensor tiny({1, 3});
  tiny.data()[0] = 5;
  tiny.data()[1] = 1;
  tiny.data()[2] = 3;
  CHECK(miqm::percentile(tiny, 0.5) == 3.0);  // ceil(1.5) = rank 2
  CHECK_THROWS_AS(miqm::percentile(Tensor({0, 0}), 0.5),
                  std::invalid_argument);
}

TEST_CASE("sigmoid slope pins the 95th percentile at 0.9") {
  for (const Scalar x95 : {0.01, 0.3, 1.0, 7.5}) {
    const Scalar k = miqm::sigmoid_slope_for_p95(x95);
    RenderSpec spec;
    spec.normalization = Normalization::kSigmoid;
    spec.sigmoid_k = k;
    CHECK(miqm::normalize_value(x95, spec) ==
          doctest::Approx(0.9).epsilon(1e-12));
  }
  CHECK(miqm::sigmoid_slope_for_p95(0.0) == 1.0);
  CHECK(miqm::sigmoid_slope_for_p95(-2.0) == 1.0);
}

TEST_CASE("normalization closed forms and clamping") {
  RenderSpec sig;
  sig.normalization = Normalization::kSigmoid;
  sig.sigmoid_k = 2.0;
  // k*x = ln 3 gives 2*(3/4) - 1 = 1/2.
  CHECK(miqm::normalize_value(std::log(3.0) / 2.0, sig) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(miqm::normalize_value(0.0, sig) == 0.0);
  CHECK(miqm::normalize_value(1e9, sig) == 1.0);

  RenderSpec none;
  none.normalization = Normalization::kNone;
  CHECK(miqm::normalize_value(0.25, none) == 0.25);
  CHECK(miqm::normalize_value(1.5, none) == 1.0);
  CHECK(miqm::normalize_value(-0.2, none) == 0.0);
}

TEST_CASE("normalization and colormap preserve order") {
  miqm::Rng rng = miqm::Rng::stream(404, 0);
  RenderSpec sig;
  sig.normalization = Normalization::kSigmoid;
  sig.sigmoid_k = 3.7;
  for (int rep = 0; rep < 200; ++rep) {
    Scalar a = (rng.uniform() - 0.3) * 5.0;
    Scalar b = (rng.uniform() - 0.3) * 5.0;
    if (a > b) std::swap(a, b);
    const Scalar na = miqm::normalize_value(a, sig);
    const Scalar nb = miqm::normalize_value(b, sig);
    CHECK(na <= nb);
    CHECK(miqm::colormap_index(na) <= miqm::colormap_index(nb));
  }
}

TEST_CASE("magma table is a dark-to-bright ramp") {
  const auto& t = miqm::magma_table();
  auto lum = [&](int i) {
    return 0.2126 * t[i][0] + 0.7152 * t[i][1] + 0.0722 * t[i][2];
  };
  CHECK(lum(0) < 1.0);
  CHECK(lum(255) > 240.0);
  for (int i = 0; i + 1 < 256; ++i) {
    // 8-bit rounding allows sub-quantum dips, never a real reversal.
    CHECK(lum(i + 1) >= lum(i) - 0.75);
  }
  for (int i = 0; i + 8 < 256; i += 8) CHECK(lum(i + 8) > lum(i));
}

TEST_CASE("zero error map renders uniformly darkest") {
  fs::create_directories("viz_out");
  MetricResult r;
  r.error_map = Tensor({3, 4});
  const std::string path =
      miqm::render_error_map(r, spec_to("viz_out/zero.png"));
  const Tensor img = miqm::read_png(path);
  const auto& darkest = miqm::magma_table()[0];
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int c = 0; c < 3; ++c) {
        CHECK(byte_of(img.at(y, x, c)) == darkest[c]);
      }
    }
  }
}

TEST_CASE("monotone ramp renders with monotone intensity") {
  fs::create_directories("viz_out");
  MetricResult r;
  r.error_map = Tensor({1, 256});
  for (int i = 0; i < 256; ++i) r.error_map.data()[i] = i / 255.0;

  RenderSpec gray = spec_to("viz_out/ramp_gray.png");
  gray.colormap = "gray";
  const Tensor g = miqm::read_png(miqm::render_error_map(r, gray));
  for (int x = 0; x + 1 < 256; ++x) {
    CHECK(byte_of(g.at(0, x + 1, 0)) == byte_of(g.at(0, x, 0)) + 1);
  }

  const Tensor m = miqm::read_png(
      miqm::render_error_map(r, spec_to("viz_out/ramp_magma.png")));
  for (int x = 0; x + 1 < 256; ++x) {
    const Scalar l0 = 0.2126 * m.at(0, x, 0) + 0.7152 * m.at(0, x, 1) +
                      0.0722 * m.at(0, x, 2);
    const Scalar l1 = 0.2126 * m.at(0, x + 1, 0) + 0.7152 * m.at(0, x + 1, 1) +
                      0.0722 * m.at(0, x + 1, 2);
    CHECK(l1 >= l0 - 0.75 / 255.0);
  }
}

TEST_CASE("mask renders grayscale with exact anchors") {
  fs::create_directories("viz_out");
  Tensor mask({2, 3, 1});
  for (std::int64_t i = 0; i < mask.numel(); ++i) mask.data()[i] = 0.5;
  mask.data()[0] = 0.0;
  mask.data()[1] = 1.0;
  const std::string path =
      miqm::render_mask(mask, spec_to("viz_out/mask.png"));
  const Tensor img = miqm::read_png(path);
  CHECK(byte_of(img.at(0, 0, 0)) == 0);
  CHECK(byte_of(img.at(0, 1, 0)) == 255);
  CHECK(byte_of(img.at(1, 2, 0)) == 128);
  // Grayscale render: all three channels agree.
  CHECK(img.at(0, 1, 0) == img.at(0, 1, 1));
  CHECK(img.at(0, 1, 1) == img.at(0, 1, 2));
}

TEST_CASE("renders are byte-identical and carry sidecars") {
  fs::create_directories("viz_out");
  const Tensor ref = miqm_test::synth_reference(16, 16);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.1, 5);
  const MetricResult r = miqm::evaluate_classic(miqm::MetricId::kMae, ref,
                                                dist);
  REQUIRE(r.error_map.numel() > 0);

  RenderSpec spec = spec_to("viz_out/emap_a.png");
  spec.normalization = Normalization::kSigmoid;
  spec.sigmoid_k = miqm::sigmoid_slope_for_p95(
      miqm::percentile(r.error_map, 0.95));
  miqm::render_error_map(r, spec);
  RenderSpec again = spec;
  again.out_path = "viz_out/emap_b.png";
  miqm::render_error_map(r, again);
  CHECK(miqm::sha256_file("viz_out/emap_a.png") ==
        miqm::sha256_file("viz_out/emap_b.png"));

  const nlohmann::json side =
      nlohmann::json::parse(std::ifstream("viz_out/emap_a.png.json"));
  CHECK(side["kind"] == "error_map");
  CHECK(side["colormap"] == "magma");
  CHECK(side["normalization"] == "sigmoid");
  CHECK(side["sigmoid_k"].get<Scalar>() == spec.sigmoid_k);
  CHECK(side["input_max"].get<Scalar>() >= side["input_min"].get<Scalar>());
}

TEST_CASE("contrast sweep renders one mask per factor") {
  fs::create_directories("viz_out");
  const Tensor ref = miqm_test::synth_reference(16, 16);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.15, 9);
  const miqm::EnhancedMetric em(miqm::MetricId::kMae, nullptr, 11);

  const auto paths = miqm::contrast_sweep(em, ref, dist,
                                          spec_to("viz_out/sweep.png"));
  REQUIRE(paths.size() == 3);
  CHECK(paths[0] == "viz_out/sweep_x0.5.png");
  CHECK(paths[1] == "viz_out/sweep_x1.png");
  CHECK(paths[2] == "viz_out/sweep_x2.png");
  for (const auto& p : paths) CHECK(fs::exists(p));

  // Factor 1 is the identity: same bytes as rendering the mask directly.
  const auto direct = em.evaluate(ref, dist);
  miqm::render_mask(direct.masks.front(), spec_to("viz_out/direct.png"));
  CHECK(miqm::sha256_file("viz_out/direct.png") ==
        miqm::sha256_file(paths[1]));
  // Contrast changes the stimulus, so an untrained mask changes too.
  CHECK(miqm::sha256_file(paths[0]) != miqm::sha256_file(paths[2]));
}

TEST_CASE("contrast scaling pivots at mid-gray and clips") {
  Tensor img({1, 1, 3});
  img.data()[0] = 0.8;
  img.data()[1] = 0.5;
  img.data()[2] = 0.1;
  const Tensor half = miqm::scale_contrast(img, 0.5);
  CHECK(half.data()[0] == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(half.data()[1] == doctest::Approx(0.5).epsilon(1e-15));
  const Tensor twice = miqm::scale_contrast(img, 2.0);
  CHECK(twice.data()[0] == 1.0);  // 0.5 + 2*0.3 clips
  CHECK(twice.data()[2] == 0.0);  // 0.5 - 2*0.4 clips
  const Tensor same = miqm::scale_contrast(img, 1.0);
  CHECK(same.data()[0] == img.data()[0]);
}

TEST_CASE("render errors") {
  MetricResult empty;
  CHECK_THROWS_AS(miqm::render_error_map(empty, spec_to("viz_out/x.png")),
                  std::invalid_argument);
  Tensor mask({2, 2});
  RenderSpec bad_k = spec_to("viz_out/x.png");
  bad_k.normalization = Normalization::kSigmoid;
  bad_k.sigmoid_k = 0.0;
  CHECK_THROWS_AS(miqm::render_mask(mask, bad_k), std::invalid_argument);
  RenderSpec no_path;
  CHECK_THROWS_AS(miqm::render_mask(mask, no_path), std::invalid_argument);
  CHECK_THROWS_AS(miqm::apply_colormap(mask, "viridis"),
                  std::invalid_argument);
}
