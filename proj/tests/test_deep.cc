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
#include <fstream>
#include <vector>

#include "deep/deep_metrics.h"
#include "deep/vgg.h"
#include "deep/weights.h"
#include "deep_fixture.h"
#include "doctest.h"
#include "json.hpp"
#include "synth_images.h"
#include "test_util.h"

using miqm::DeepContext;
using miqm::MetricId;
using miqm::MetricResult;
using miqm::Rng;
using miqm::Scalar;
using miqm::Tensor;
using miqm::Var;
using miqm::Vgg16;
using miqm::WeightManifest;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(MIQM_TEST_DATA_DIR) + "/" + rel;
}

const DeepContext& fixture_context() {
  static const DeepContext ctx = [] {
    const std::string manifest =
        miqm_test::write_vgg_fixture("deep_fixture");
    return DeepContext::load(manifest);
  }();
  return ctx;
}

Scalar rel_err(Scalar got, Scalar want) {
  return std::abs(got - want) /
         std::max({std::abs(got), std::abs(want), Scalar(1e-12)});
}

}  // namespace

TEST_CASE("weight manifest round trip and integrity checks") {
  std::filesystem::create_directories("weights_tmp");
  std::map<std::string, Tensor> tensors;
  Rng rng(301);
  tensors["a.w"] = miqm_test::random_tensor({2, 3, 4, 5}, rng);
  tensors["a.b"] = miqm_test::random_tensor({5}, rng);
  miqm::write_weight_manifest("weights_tmp", "manifest.json", tensors);

  const WeightManifest m = WeightManifest::load("weights_tmp/manifest.json");
  CHECK(m.has("a.w"));
  CHECK(m.has("a.b"));
  CHECK(!m.has("missing"));
  CHECK(m.names().size() == 2);

  const Tensor back = m.tensor("a.w");
  REQUIRE(back.shape() == tensors["a.w"].shape());
  for (std::int64_t i = 0; i < back.numel(); ++i) {
    // Exact up to the float32 storage round trip.
    CHECK(back[i] ==
          static_cast<Scalar>(static_cast<float>(tensors["a.w"][i])));
  }

  CHECK_THROWS_AS(m.tensor("missing"), std::runtime_error);

  SUBCASE("tampered blob fails the checksum") {
    std::fstream f("weights_tmp/a_b.bin",
                   std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekp(3);
    char byte = 0;
    f.read(&byte, 1);
    f.seekp(3);
    byte = static_cast<char>(byte ^ 0x40);
    f.write(&byte, 1);
    f.close();
    CHECK_THROWS_AS(m.tensor("a.b"), std::runtime_error);
    // Restore for later runs.
    miqm::write_weight_manifest("weights_tmp", "manifest.json", tensors);
  }

  SUBCASE("unknown manifest format is rejected") {
    std::ofstream bad("weights_tmp/bad.json");
    bad << "{\"format\": \"something-else\", \"tensors\": {}}\n";
    bad.close();
    CHECK_THROWS_AS(WeightManifest::load("weights_tmp/bad.json"),
                    std::runtime_error);
  }
}

TEST_CASE("backbone forward matches independent reference") {
  std::ifstream in(data_path("deep/expected.json"));
  REQUIRE(in.good());
  nlohmann::json expected;
  in >> expected;

  const DeepContext& ctx = fixture_context();
  CHECK(ctx.lpips_weights_loaded);
  CHECK(ctx.dists_weights_loaded);

  const int h = expected.at("h");
  const int w = expected.at("w");
  const Tensor ref = miqm_test::synth_reference(h, w);
  const Tensor dist = miqm_test::synth_noisy(
      ref, expected.at("amp").get<Scalar>(), expected.at("salt").get<int>());

  const std::vector<Var> fr = ctx.vgg->features(Var::constant(ref));
  const auto want_shapes =
      expected.at("tap_shapes").get<std::vector<std::vector<int>>>();
  const auto want_sums = expected.at("tap_abs_sum").get<std::vector<Scalar>>();
  REQUIRE(fr.size() == want_shapes.size());
  for (size_t t = 0; t < fr.size(); ++t) {
    CHECK(fr[t].value().shape() == want_shapes[t]);
    Scalar s = 0;
    const Tensor& f = fr[t].value();
    for (std::int64_t i = 0; i < f.numel(); ++i) s += std::abs(f[i]);
    CHECK(rel_err(s, want_sums[t]) < 1e-8);
  }

  const MetricResult vl1 =
      miqm::evaluate_deep(ctx, MetricId::kVggL1, ref, dist);
  const MetricResult lp = miqm::evaluate_deep(ctx, MetricId::kLpips, ref, dist);
  const MetricResult ds = miqm::evaluate_deep(ctx, MetricId::kDists, ref, dist);
  CHECK(rel_err(vl1.score, expected.at("vgg_l1").get<Scalar>()) < 1e-8);
  CHECK(rel_err(lp.score, expected.at("lpips").get<Scalar>()) < 1e-8);
  CHECK(rel_err(ds.score, expected.at("dists").get<Scalar>()) < 1e-8);

  // Maps at first-tap (input) resolution; DISTS is score-only.
  CHECK(vl1.error_map.shape() == std::vector<int>{h, w, 1});
  CHECK(lp.error_map.shape() == std::vector<int>{h, w, 1});
  CHECK(ds.error_map.empty());
  for (std::int64_t i = 0; i < lp.error_map.numel(); ++i) {
    CHECK(vl1.error_map[i] >= 0.0);
    CHECK(lp.error_map[i] >= 0.0);
  }
}

TEST_CASE("odd input sizes floor through the pooling pyramid") {
  const DeepContext& ctx = fixture_context();
  const Tensor img = miqm_test::synth_reference(19, 21);
  const std::vector<Var> taps = ctx.vgg->features(Var::constant(img));
  CHECK(taps[0].value().shape() == std::vector<int>{19, 21, 64});
  CHECK(taps[1].value().shape() == std::vector<int>{9, 10, 128});
  CHECK(taps[2].value().shape() == std::vector<int>{4, 5, 256});
  CHECK(taps[3].value().shape() == std::vector<int>{2, 2, 512});
  CHECK(taps[4].value().shape() == std::vector<int>{1, 1, 512});
}

TEST_CASE("identical inputs score zero") {
  const DeepContext& ctx = fixture_context();
  const Tensor ref = miqm_test::synth_reference(16, 16);
  for (const MetricId id :
       {MetricId::kVggL1, MetricId::kLpips, MetricId::kDists}) {
    const MetricResult r = miqm::evaluate_deep(ctx, id, ref, ref);
    CHECK(std::abs(r.score) < 1e-12);
  }
  CHECK_THROWS_AS(
      miqm::evaluate_deep(ctx, MetricId::kVggL1, ref,
                          miqm_test::synth_reference(16, 18)),
      std::invalid_argument);
  CHECK_THROWS_AS(miqm::evaluate_deep(ctx, MetricId::kVggL1,
                                      miqm_test::synth_reference(8, 8),
                                      miqm_test::synth_reference(8, 8)),
                  std::invalid_argument);
}

TEST_CASE("uniform fallback weights when the extras are absent") {
  const std::string manifest =
      miqm_test::write_vgg_fixture_bare("deep_fixture_bare");
  const DeepContext ctx = DeepContext::load(manifest);
  CHECK(!ctx.lpips_weights_loaded);
  CHECK(!ctx.dists_weights_loaded);
  for (int t = 0; t < Vgg16::kNumTaps; ++t) {
    const int c = Vgg16::kTapChannels[t];
    REQUIRE(ctx.lpips_w[t].numel() == c);
    CHECK(ctx.lpips_w[t][0] == 1.0 / c);
    CHECK(ctx.lpips_w[t][c - 1] == 1.0 / c);
  }
  Scalar total = 0;
  for (size_t s = 0; s < ctx.dists_alpha.size(); ++s) {
    for (std::int64_t i = 0; i < ctx.dists_alpha[s].numel(); ++i) {
      total += ctx.dists_alpha[s][i] + ctx.dists_beta[s][i];
    }
  }
  CHECK(std::abs(total - 1.0) < 1e-12);

  const Tensor ref = miqm_test::synth_reference(16, 16);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.2, 9);
  for (const MetricId id :
       {MetricId::kVggL1, MetricId::kLpips, MetricId::kDists}) {
    CHECK(std::abs(miqm::evaluate_deep(ctx, id, ref, ref).score) < 1e-12);
    CHECK(miqm::evaluate_deep(ctx, id, ref, dist).score > 0.0);
  }
}

TEST_CASE("scores increase with distortion strength") {
  const DeepContext& ctx = fixture_context();
  const Tensor ref = miqm_test::synth_reference(16, 16);
  std::vector<Scalar> vl1, lp, ds;
  for (const Scalar amp : {0.05, 0.15, 0.30}) {
    const Tensor dist = miqm_test::synth_noisy(ref, amp, 17);
    vl1.push_back(miqm::evaluate_deep(ctx, MetricId::kVggL1, ref, dist).score);
    lp.push_back(miqm::evaluate_deep(ctx, MetricId::kLpips, ref, dist).score);
    ds.push_back(miqm::evaluate_deep(ctx, MetricId::kDists, ref, dist).score);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    CHECK(vl1[i] < vl1[i + 1]);
    CHECK(lp[i] < lp[i + 1]);
    CHECK(ds[i] < ds[i + 1]);
  }
}

TEST_CASE("gradients flow to the input, not the backbone") {
  const DeepContext& ctx = fixture_context();
  const Tensor ref = miqm_test::synth_reference(16, 16);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.2, 21);
  const Var rc = Var::constant(ref);

  Rng rng(401);
  std::vector<Var> leaves = {Var::leaf(dist)};

  SUBCASE("vgg-l1") {
    const auto builder = [&] {
      return miqm::vgg_l1_score(ctx.vgg->features(rc),
                                ctx.vgg->features(leaves[0]));
    };
    CHECK(miqm_test::fd_check(leaves, builder, rng, 6, 1e-5) < 1e-3);
  }
  SUBCASE("lpips") {
    const auto builder = [&] {
      std::vector<Var> nr, nd;
      for (const Var& f : ctx.vgg->features(rc))
        nr.push_back(miqm::lpips_normalize(f));
      for (const Var& f : ctx.vgg->features(leaves[0]))
        nd.push_back(miqm::lpips_normalize(f));
      return miqm::lpips_score(ctx, nr, nd);
    };
    CHECK(miqm_test::fd_check(leaves, builder, rng, 6, 1e-5) < 1e-3);
  }
  SUBCASE("dists") {
    const auto builder = [&] {
      std::vector<Var> sr = {rc}, sd = {leaves[0]};
      for (const Var& f : ctx.vgg->features(rc)) sr.push_back(f);
      for (const Var& f : ctx.vgg->features(leaves[0])) sd.push_back(f);
      return miqm::dists_score(ctx, sr, sd);
    };
    CHECK(miqm_test::fd_check(leaves, builder, rng, 6, 1e-5) < 1e-3);
  }
  SUBCASE("repeated evaluation is unchanged by backward passes") {
    Var loss = miqm::vgg_l1_score(ctx.vgg->features(rc),
                                  ctx.vgg->features(Var::constant(dist)));
    const Scalar first = loss.item();
    Var probe = Var::leaf(dist);
    Var loss2 =
        miqm::vgg_l1_score(ctx.vgg->features(rc), ctx.vgg->features(probe));
    miqm::backward(loss2);
    // The input picked up a gradient; the frozen weights did not move.
    Scalar gsum = 0;
    for (std::int64_t i = 0; i < probe.grad().numel(); ++i) {
      gsum += std::abs(probe.grad()[i]);
    }
    CHECK(gsum > 0.0);
    Var loss3 = miqm::vgg_l1_score(ctx.vgg->features(rc),
                                   ctx.vgg->features(Var::constant(dist)));
    CHECK(loss3.item() == first);
  }
}
