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
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "core/sha256.h"
#include "metrics/classic.h"
#include "metrics/flip.h"
#include "synth_images.h"
#include "test_util.h"

using namespace miqm;
using miqm_test::fd_check;
using miqm_test::synth_affine;
using miqm_test::synth_noise_image;
using miqm_test::synth_noisy;
using miqm_test::synth_reference;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(MIQM_TEST_DATA_DIR) + "/" + rel;
}

std::vector<double> read_doubles(const std::string& path, size_t n) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::vector<double> out(n);
  f.read(reinterpret_cast<char*>(out.data()),
         static_cast<std::streamsize>(n * sizeof(double)));
  REQUIRE(f.gcount() == static_cast<std::streamsize>(n * sizeof(double)));
  return out;
}

}  // namespace

TEST_CASE("identical inputs produce the identity scores") {
  Tensor ref = synth_reference(24, 30);
  CHECK(evaluate_classic(MetricId::kMae, ref, ref).score == 0.0);
  CHECK(evaluate_classic(MetricId::kPsnr, ref, ref).score == kPsnrCap);
  CHECK(evaluate_classic(MetricId::kSsim, ref, ref).score ==
        doctest::Approx(1.0).epsilon(1e-12));
  Tensor big = synth_reference(176, 180);
  CHECK(evaluate_classic(MetricId::kMsSsim, big, big).score ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(evaluate_flip(ref, ref).score == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mae and psnr match direct computation") {
  Tensor ref = synth_reference(21, 17);
  Tensor dist = synth_noisy(ref, 0.2, 3);
  Scalar sum_abs = 0, sum_sq = 0;
  for (std::int64_t i = 0; i < ref.numel(); ++i) {
    sum_abs += std::abs(ref[i] - dist[i]);
    sum_sq += (ref[i] - dist[i]) * (ref[i] - dist[i]);
  }
  const Scalar mae = sum_abs / static_cast<Scalar>(ref.numel());
  const Scalar mse = sum_sq / static_cast<Scalar>(ref.numel());
  MetricResult rm = evaluate_classic(MetricId::kMae, ref, dist);
  CHECK(rm.score == doctest::Approx(mae).epsilon(1e-12));
  MetricResult rp = evaluate_classic(MetricId::kPsnr, ref, dist);
  CHECK(rp.score ==
        doctest::Approx(10 * std::log10(1 / mse)).epsilon(1e-12));

  // Maps: full size, channel-mean values.
  REQUIRE(rm.error_map.h() == 21);
  REQUIRE(rm.error_map.w() == 17);
  REQUIRE(rm.error_map.c() == 1);
  Scalar expect = (std::abs(ref.at(4, 5, 0) - dist.at(4, 5, 0)) +
                   std::abs(ref.at(4, 5, 1) - dist.at(4, 5, 1)) +
                   std::abs(ref.at(4, 5, 2) - dist.at(4, 5, 2))) /
                  3;
  CHECK(rm.error_map.at(4, 5, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ssim matches the frozen oracle values") {
  // Frozen from oracles/ssim_reference.py (scikit-image 0.25.2).
  Tensor ref = synth_reference(48, 64);
  Tensor dist = synth_noisy(ref, 0.12, 9);
  CHECK(evaluate_classic(MetricId::kSsim, ref, dist).score ==
        doctest::Approx(0.436934785354).epsilon(1e-6));

  Tensor ref2 = synth_reference(32, 32);
  Tensor dist2 = synth_affine(ref2, 0.85, 0.1);
  CHECK(evaluate_classic(MetricId::kSsim, ref2, dist2).score ==
        doctest::Approx(0.988533712182).epsilon(1e-6));

  // The error map keeps the input size and inverts orientation.
  MetricResult r = evaluate_classic(MetricId::kSsim, ref, dist);
  CHECK(r.error_map.h() == 48);
  CHECK(r.error_map.w() == 64);
  CHECK(r.error_map.c() == 1);
}

TEST_CASE("ms-ssim matches the frozen oracle values") {
  Tensor ref = synth_reference(192, 176);
  CHECK(evaluate_classic(MetricId::kMsSsim, ref, synth_noisy(ref, 0.15, 11))
            .score == doctest::Approx(0.756617491509).epsilon(1e-6));
  CHECK(evaluate_classic(MetricId::kMsSsim, ref, synth_affine(ref, 0.9, 0.02))
            .score == doctest::Approx(0.996987945198).epsilon(1e-6));
  CHECK_THROWS_AS(
      evaluate_classic(MetricId::kMsSsim, synth_reference(100, 200),
                       synth_reference(100, 200)),
      std::invalid_argument);
}

TEST_CASE("flip matches the frozen reference vectors") {
  std::ifstream mf(data_path("flip/manifest.json"));
  REQUIRE(mf.good());
  nlohmann::json manifest;
  mf >> manifest;
  REQUIRE(manifest.size() == 3);

  for (const auto& c : manifest) {
    CAPTURE(c["name"].get<std::string>());
    const int h = c["h"], w = c["w"];
    const Scalar ppd = c["ppd"];
    Tensor ref, dist;
    const std::string name = c["name"];
    if (name == "structured_noise") {
      ref = synth_reference(h, w);
      dist = synth_noisy(ref, 0.1, 2);
    } else if (name == "noise_affine") {
      ref = synth_noise_image(h, w, 5);
      dist = synth_affine(ref, 0.9, 0.05);
    } else {
      ref = synth_reference(h, w);
      dist = synth_noisy(ref, 0.25, 7);
    }
    // Generator parity with the script that froze the vectors.
    CHECK(sha256_hex(ref.data(), sizeof(Scalar) * ref.numel()) ==
          c["ref_sha256"].get<std::string>());
    CHECK(sha256_hex(dist.data(), sizeof(Scalar) * dist.numel()) ==
          c["dist_sha256"].get<std::string>());

    MetricResult r = evaluate_flip(ref, dist, ppd);
    std::vector<double> expect =
        read_doubles(data_path("flip/" + c["map_file"].get<std::string>()),
                     static_cast<size_t>(h) * w);
    Scalar worst = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        worst = std::max(worst,
                         std::abs(r.error_map.at(y, x, 0) -
                                  expect[static_cast<size_t>(y) * w + x]));
    CHECK(worst < 1e-6);
    CHECK(r.score == doctest::Approx(c["score"].get<Scalar>()).epsilon(1e-8));
  }
}

TEST_CASE("scores degrade monotonically with noise amplitude") {
  Tensor ref = synth_reference(48, 40);
  Scalar prev_mae = -1, prev_ssim = 2, prev_flip = -1;
  int salt = 20;
  for (Scalar amp : {0.05, 0.1, 0.2, 0.35}) {
    Tensor dist = synth_noisy(ref, amp, static_cast<std::uint32_t>(salt++));
    const Scalar mae = evaluate_classic(MetricId::kMae, ref, dist).score;
    const Scalar ssim = evaluate_classic(MetricId::kSsim, ref, dist).score;
    const Scalar flip = evaluate_flip(ref, dist).score;
    CHECK(mae > prev_mae);
    CHECK(ssim < prev_ssim);
    CHECK(flip > prev_flip);
    prev_mae = mae;
    prev_ssim = ssim;
    prev_flip = flip;
  }
}

TEST_CASE("metrics are symmetric in their arguments") {
  Tensor a = synth_reference(36, 44);
  Tensor b = synth_noisy(a, 0.15, 31);
  CHECK(evaluate_classic(MetricId::kMae, a, b).score ==
        evaluate_classic(MetricId::kMae, b, a).score);
  CHECK(evaluate_classic(MetricId::kSsim, a, b).score ==
        doctest::Approx(evaluate_classic(MetricId::kSsim, b, a).score)
            .epsilon(1e-12));
  CHECK(evaluate_flip(a, b).score ==
        doctest::Approx(evaluate_flip(b, a).score).epsilon(1e-12));
}

TEST_CASE("metric score graphs are differentiable") {
  Rng rng(71);
  Tensor refv = synth_reference(20, 24);
  Tensor distv = synth_noisy(refv, 0.15, 41);

  SUBCASE("mae") {
    Var r = Var::leaf(refv);
    Var d = Var::leaf(distv);
    std::vector<Var> leaves = {r, d};
    auto builder = [&]() { return mae_parts(r, d).score; };
    CHECK(fd_check(leaves, builder, rng, 20) < 1e-5);
  }
  SUBCASE("psnr") {
    Var r = Var::leaf(refv);
    Var d = Var::leaf(distv);
    std::vector<Var> leaves = {r, d};
    auto builder = [&]() { return psnr_parts(r, d).score; };
    CHECK(fd_check(leaves, builder, rng, 20) < 1e-5);
  }
  SUBCASE("ssim") {
    Var r = Var::leaf(refv);
    Var d = Var::leaf(distv);
    std::vector<Var> leaves = {r, d};
    auto builder = [&]() { return ssim_parts(r, d).score; };
    CHECK(fd_check(leaves, builder, rng, 20, 1e-5) < 1e-4);
  }
  SUBCASE("flip") {
    FlipContext ctx = make_flip_context(67);
    Var r = Var::leaf(refv);
    Var d = Var::leaf(distv);
    std::vector<Var> leaves = {r, d};
    auto builder = [&]() { return flip_parts(r, d, ctx).score; };
    CHECK(fd_check(leaves, builder, rng, 12, 1e-5) < 1e-3);
  }
}

TEST_CASE("metric name registry round-trips") {
  for (MetricId id : all_metrics()) {
    auto back = metric_from_name(metric_name(id));
    REQUIRE(back.has_value());
    CHECK(*back == id);
  }
  CHECK_FALSE(metric_from_name("nope").has_value());
  CHECK(metric_higher_better(MetricId::kPsnr));
  CHECK_FALSE(metric_higher_better(MetricId::kFlip));
  CHECK(metric_uses_features(MetricId::kLpips));
  CHECK_FALSE(metric_has_map(MetricId::kDists));
}
