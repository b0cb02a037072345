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
#include <memory>

#include "core/sha256.h"
#include "deep_fixture.h"
#include "doctest.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"
#include "metrics/classic.h"
#include "metrics/flip.h"
#include "synth_images.h"
#include "test_util.h"

using miqm::DeepContext;
using miqm::EnhancedMetric;
using miqm::MaskGenerator;
using miqm::MetricId;
using miqm::ParamStore;
using miqm::Rng;
using miqm::Scalar;
using miqm::ScalerNetwork;
using miqm::Tensor;
using miqm::Var;

namespace {

std::shared_ptr<const DeepContext> fixture_deep() {
  static const std::shared_ptr<const DeepContext> ctx = [] {
    const std::string manifest =
        miqm_test::write_vgg_fixture("deep_fixture");
    return std::make_shared<const DeepContext>(
        DeepContext::load(manifest));
  }();
  return ctx;
}

std::vector<Var> param_leaves(ParamStore& store) {
  std::vector<Var> leaves;
  for (miqm::Param& p : store.params()) leaves.push_back(p.var);
  return leaves;
}

Scalar base_score(MetricId id, const Tensor& r, const Tensor& d) {
  if (id == MetricId::kFlip) return miqm::evaluate_flip(r, d).score;
  if (miqm::metric_uses_features(id)) {
    return miqm::evaluate_deep(*fixture_deep(), id, r, d).score;
  }
  return miqm::evaluate_classic(id, r, d).score;
}

}  // namespace

TEST_CASE("mask generator shape, range, and determinism") {
  ParamStore store;
  Rng rng = Rng::stream(7, 1000);
  MaskGenerator gen(store, "g.image", 3, rng);
  // 4 convs, weight+bias each.
  CHECK(store.params().size() == 8);
  const std::int64_t expect =
      (9 * 6 * 64 + 64) + 2 * (9 * 64 * 64 + 64) + (9 * 64 * 1 + 1);
  CHECK(store.total_params() == expect);

  const Tensor ref = miqm_test::synth_reference(12, 10);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.2, 3);
  const Var m = gen.forward(Var::constant(ref), Var::constant(dist));
  REQUIRE(m.value().shape() == std::vector<int>{12, 10, 1});
  for (std::int64_t i = 0; i < m.value().numel(); ++i) {
    CHECK(m.value()[i] > 0.0);
    CHECK(m.value()[i] < 1.0);
  }

  // Same seed stream, same draws.
  ParamStore store2;
  Rng rng2 = Rng::stream(7, 1000);
  MaskGenerator gen2(store2, "g.image", 3, rng2);
  const Var m2 = gen2.forward(Var::constant(ref), Var::constant(dist));
  for (std::int64_t i = 0; i < m.value().numel(); ++i) {
    CHECK(m.value()[i] == m2.value()[i]);
  }

  SUBCASE("forced identity saturates the mask") {
    gen.force_identity();
    const Var mi = gen.forward(Var::constant(ref), Var::constant(dist));
    for (std::int64_t i = 0; i < mi.value().numel(); ++i) {
      CHECK(mi.value()[i] > 1.0 - 1e-7);
    }
  }
}

TEST_CASE("scaler network maps scores into (0,1)") {
  ParamStore store;
  Rng rng = Rng::stream(11, 2000);
  ScalerNetwork scaler(store, "scaler", rng);
  CHECK(store.params().size() == 6);
  for (const Scalar s : {0.0, 0.25, 1.0, 7.5}) {
    const Var out =
        scaler.forward(Var::constant(Tensor::full({1}, s)));
    REQUIRE(out.value().numel() == 1);
    CHECK(out.item() > 0.0);
    CHECK(out.item() < 1.0);
  }
}

TEST_CASE("forced identity masks reproduce the base metrics") {
  const Tensor ref = miqm_test::synth_reference(24, 20);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.18, 5);

  for (const MetricId id : {MetricId::kMae, MetricId::kPsnr, MetricId::kSsim,
                            MetricId::kFlip, MetricId::kVggL1,
                            MetricId::kLpips, MetricId::kDists}) {
    CAPTURE(miqm::metric_name(id));
    EnhancedMetric em(id, fixture_deep(), 40);
    em.force_identity();
    const Scalar enhanced = em.evaluate(ref, dist).score;
    const Scalar base = base_score(id, ref, dist);
    CHECK(std::abs(enhanced - base) <= 1e-6);
  }

  SUBCASE("ms-ssim at its minimum size") {
    const Tensor big_ref = miqm_test::synth_reference(176, 176);
    const Tensor big_dist = miqm_test::synth_noisy(big_ref, 0.15, 8);
    EnhancedMetric em(MetricId::kMsSsim, nullptr, 40);
    em.force_identity();
    const Scalar enhanced = em.evaluate(big_ref, big_dist).score;
    const Scalar base =
        miqm::evaluate_classic(MetricId::kMsSsim, big_ref, big_dist).score;
    CHECK(std::abs(enhanced - base) <= 1e-6);
    CHECK(em.evaluate(big_ref, big_dist).masks.size() == 5);
  }
}

TEST_CASE("fresh masks modulate the metric") {
  const Tensor ref = miqm_test::synth_reference(24, 20);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.18, 5);
  EnhancedMetric em(MetricId::kMae, nullptr, 41);
  const EnhancedMetric::Result r = em.evaluate(ref, dist);
  const Scalar base = miqm::evaluate_classic(MetricId::kMae, ref, dist).score;
  CHECK(r.score != base);
  CHECK(r.score > 0.0);
  REQUIRE(r.masks.size() == 1);
  CHECK(r.masks[0].shape() == std::vector<int>{24, 20, 1});
  CHECK(r.error_map.shape() == std::vector<int>{24, 20, 1});

  // A constructed twin is bit-identical (deterministic init).
  EnhancedMetric em2(MetricId::kMae, nullptr, 41);
  CHECK(em2.evaluate(ref, dist).score == r.score);
  // A different seed gives different masks.
  EnhancedMetric em3(MetricId::kMae, nullptr, 42);
  CHECK(em3.evaluate(ref, dist).score != r.score);
}

TEST_CASE("feature-metric masks sit at tap resolutions") {
  const Tensor ref = miqm_test::synth_reference(16, 16);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.2, 7);
  EnhancedMetric em(MetricId::kLpips, fixture_deep(), 43);
  CHECK(em.num_generators() == 5);
  const EnhancedMetric::Result r = em.evaluate(ref, dist);
  REQUIRE(r.masks.size() == 5);
  CHECK(r.masks[0].shape() == std::vector<int>{16, 16, 1});
  CHECK(r.masks[1].shape() == std::vector<int>{8, 8, 1});
  CHECK(r.masks[2].shape() == std::vector<int>{4, 4, 1});
  CHECK(r.masks[3].shape() == std::vector<int>{2, 2, 1});
  CHECK(r.masks[4].shape() == std::vector<int>{1, 1, 1});
  CHECK(r.error_map.shape() == std::vector<int>{16, 16, 1});
}

TEST_CASE("gradients reach the generator and scaler parameters") {
  const Tensor ref = miqm_test::synth_reference(16, 12);
  const Tensor dist = miqm_test::synth_noisy(ref, 0.2, 9);
  const Var rc = Var::constant(ref);
  const Var dc = Var::constant(dist);
  Rng rng(501);

  SUBCASE("masked mae score w.r.t. generator parameters") {
    EnhancedMetric em(MetricId::kMae, nullptr, 44);
    std::vector<Var> leaves = param_leaves(em.params());
    const auto builder = [&] { return em.build(rc, dc).score; };
    CHECK(miqm_test::fd_check(leaves, builder, rng, 12, 1e-5) < 1e-3);
  }
  SUBCASE("training loss w.r.t. generator and scaler parameters") {
    EnhancedMetric em(MetricId::kSsim, nullptr, 45);
    ScalerNetwork scaler(em.params(), "scaler", rng);
    std::vector<Var> leaves = param_leaves(em.params());
    const auto builder = [&] {
      return miqm::enhanced_training_loss(em, scaler, rc, dc, 0.4);
    };
    CHECK(miqm_test::fd_check(leaves, builder, rng, 12, 1e-5) < 1e-3);
  }
}

TEST_CASE("checkpoint round trip is exact and deterministic") {
  EnhancedMetric em(MetricId::kSsim, nullptr, 46);
  miqm::CheckpointData data;
  data.metric = miqm::metric_name(em.metric());
  data.layers = em.generator_names();
  data.init_seed = em.init_seed();
  data.config_digest = "deadbeef";
  data.epoch = 3;
  data.step = 1234;
  data.best_val = 0.8125;
  data.has_best_val = true;
  miqm::append_store(em.params(), &data);
  miqm::save_checkpoint("ckpt_a.miqm", data);

  const miqm::CheckpointData back = miqm::load_checkpoint("ckpt_a.miqm");
  CHECK(back.metric == "ssim");
  CHECK(back.layers == std::vector<std::string>{"image"});
  CHECK(back.init_seed == 46);
  CHECK(back.config_digest == "deadbeef");
  CHECK(back.epoch == 3);
  CHECK(back.step == 1234);
  CHECK(back.has_best_val);
  CHECK(back.best_val == 0.8125);
  REQUIRE(back.tensors.size() == data.tensors.size());
  for (const auto& [name, a] : data.tensors) {
    const Tensor* b = nullptr;
    for (const auto& kv : back.tensors) {
      if (kv.first == name) b = &kv.second;
    }
    REQUIRE(b != nullptr);
    REQUIRE(b->shape() == a.shape());
    for (std::int64_t j = 0; j < b->numel(); ++j) {
      CHECK((*b)[j] == static_cast<Scalar>(static_cast<float>(a[j])));
    }
  }

  SUBCASE("restoring into a different instance replays the state") {
    EnhancedMetric other(MetricId::kSsim, nullptr, 99);
    miqm::restore_store(back, &other.params());
    miqm::CheckpointData data2;
    data2.metric = back.metric;
    data2.layers = back.layers;
    data2.init_seed = back.init_seed;
    data2.config_digest = back.config_digest;
    data2.epoch = back.epoch;
    data2.step = back.step;
    data2.best_val = back.best_val;
    data2.has_best_val = true;
    miqm::append_store(other.params(), &data2);
    miqm::save_checkpoint("ckpt_b.miqm", data2);
    // float32 storage makes the rewrite byte-identical.
    CHECK(miqm::sha256_file("ckpt_a.miqm") == miqm::sha256_file("ckpt_b.miqm"));
  }

  SUBCASE("corrupt files are rejected") {
    std::ofstream bad("ckpt_bad.miqm", std::ios::binary);
    bad << "NOTMAGIC{}";
    bad.close();
    CHECK_THROWS_AS(miqm::load_checkpoint("ckpt_bad.miqm"),
                    std::runtime_error);
    EnhancedMetric wrong(MetricId::kLpips, fixture_deep(), 47);
    CHECK_THROWS_AS(miqm::restore_store(back, &wrong.params()),
                    std::runtime_error);
  }
}
