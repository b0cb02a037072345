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

#include "core/image_io.h"
#include "core/rng.h"
#include "core/sha256.h"
#include "doctest.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"
#include "restore/denoiser.h"
#include "synth_images.h"
#include "deep_fixture.h"

using miqm::DenoiseConfig;
using miqm::DenoiseResult;
using miqm::Denoiser;
using miqm::Scalar;
using miqm::Tensor;

namespace fs = std::filesystem;

namespace {

// Three 24x24 training images on disk, plus a mae mask checkpoint.
const std::string& fixture_dir() {
  static const std::string dir = [] {
    fs::create_directories("restore_fixture/imgs");
    for (int i = 0; i < 3; ++i) {
      miqm::write_png("restore_fixture/imgs/t" + std::to_string(i) + ".png",
                      miqm_test::synth_noise_image(24, 24, 70 + i));
    }
    miqm::EnhancedMetric em(miqm::MetricId::kMae, nullptr, 3);
    miqm::CheckpointData ck;
    ck.metric = "mae";
    ck.init_seed = 3;
    miqm::append_store(em.params(), &ck);
    miqm::save_checkpoint("restore_fixture/emae.miqm", ck);
    return std::string("restore_fixture");
  }();
  return dir;
}

DenoiseConfig small_config() {
  DenoiseConfig cfg;
  cfg.train_dir = fixture_dir() + "/imgs";
  cfg.patch = 8;
  cfg.patches_per_image = 2;
  cfg.batch = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("patch sampling honours the sigma envelope") {
  const Tensor img = miqm_test::synth_noise_image(24, 30, 1);
  DenoiseConfig cfg = small_config();
  cfg.sigma_min = 10;
  cfg.sigma_max = 35;
  miqm::Rng rng = miqm::Rng::stream(8, 0);
  for (int i = 0; i < 100; ++i) {
    const miqm::PatchSample s = miqm::sample_patch(img, cfg, rng);
    CHECK(s.sigma >= 10.0);
    CHECK(s.sigma <= 35.0);
    CHECK(s.clean.h() == 8);
    CHECK(s.clean.w() == 8);
    for (std::int64_t j = 0; j < s.noisy.numel(); ++j) {
      CHECK(s.noisy.data()[j] >= 0.0);
      CHECK(s.noisy.data()[j] <= 1.0);
    }
  }

  // Oversized patch shrinks to the image; zero sigma leaves pixels alone.
  cfg.patch = 64;
  cfg.sigma_min = cfg.sigma_max = 0;
  const miqm::PatchSample whole = miqm::sample_patch(img, cfg, rng);
  CHECK(whole.clean.h() == 24);
  CHECK(whole.clean.w() == 30);
  for (std::int64_t j = 0; j < whole.noisy.numel(); ++j) {
    CHECK(whole.noisy.data()[j] == whole.clean.data()[j]);
  }
}

TEST_CASE("config validation") {
  DenoiseConfig cfg = small_config();
  cfg.sigma_max = 60;
  CHECK_THROWS_AS(miqm::train_denoiser(cfg, "restore_bad"),
                  std::invalid_argument);
  cfg = small_config();
  cfg.sigma_min = 30;
  cfg.sigma_max = 10;
  CHECK_THROWS_AS(miqm::train_denoiser(cfg, "restore_bad"),
                  std::invalid_argument);
  cfg = small_config();
  cfg.loss = "l2";
  CHECK_THROWS_AS(miqm::train_denoiser(cfg, "restore_bad"),
                  std::invalid_argument);
  cfg = small_config();
  cfg.loss = "e-mae";  // no checkpoint supplied
  CHECK_THROWS_AS(miqm::train_denoiser(cfg, "restore_bad"),
                  std::invalid_argument);
  cfg = small_config();
  cfg.train_dir = "restore_fixture/nowhere";
  CHECK_THROWS_AS(miqm::train_denoiser(cfg, "restore_bad"),
                  std::invalid_argument);
}

TEST_CASE("denoiser network shape and determinism") {
  Denoiser a(9), b(9), c(10);
  CHECK(a.params().params().size() == 2 * Denoiser::kLayers);
  const Tensor img = miqm_test::synth_noise_image(12, 12, 2);
  const Tensor da = a.denoise(img);
  const Tensor db = b.denoise(img);
  const Tensor dc = c.denoise(img);
  REQUIRE(da.numel() == img.numel());
  bool same_ab = true, same_ac = true;
  for (std::int64_t i = 0; i < da.numel(); ++i) {
    same_ab = same_ab && da.data()[i] == db.data()[i];
    same_ac = same_ac && da.data()[i] == dc.data()[i];
  }
  CHECK(same_ab);
  CHECK(!same_ac);
  // Residual init: biases are zero and weights small, so the untrained
  // net is close to the identity.
  Scalar max_dev = 0;
  for (std::int64_t i = 0; i < da.numel(); ++i) {
    max_dev = std::max(max_dev, std::abs(da.data()[i] - img.data()[i]));
  }
  CHECK(max_dev < 0.5);
}

TEST_CASE("mae training reduces the loss and checkpoints") {
  DenoiseConfig cfg = small_config();
  cfg.sigma_min = cfg.sigma_max = 50;
  cfg.epochs = 40;
  cfg.learning_rate = 5e-3;
  fs::remove_all("restore_mae");
  const DenoiseResult r = miqm::train_denoiser(cfg, "restore_mae");
  CHECK(r.steps == 80);  // 6 patches per epoch, batch 3, 40 epochs
  REQUIRE(r.epoch_mean_loss.size() == 40);
  // Patch draws differ per epoch, so average a few epochs at each end.
  Scalar head = 0, tail = 0;
  for (int i = 0; i < 4; ++i) {
    head += r.epoch_mean_loss[i] / 4;
    tail += r.epoch_mean_loss[36 + i] / 4;
  }
  CHECK(tail < head);
  CHECK(fs::exists(r.checkpoint));
  CHECK(fs::exists(r.log_path));

  std::string label;
  const Denoiser net = miqm::load_denoiser(r.checkpoint, &label);
  CHECK(label == "mae");
  // The trained net must beat the identity on the training noise level.
  const Tensor clean = miqm_test::synth_noise_image(24, 24, 70);
  miqm::Rng rng = miqm::Rng::stream(77, 0);
  Tensor noisy = clean;
  for (std::int64_t i = 0; i < noisy.numel(); ++i) {
    noisy.data()[i] = std::clamp<Scalar>(
        noisy.data()[i] + (50.0 / 255.0) * rng.normal(), 0, 1);
  }
  const Tensor den = net.denoise(noisy);
  Scalar mae_noisy = 0, mae_den = 0;
  for (std::int64_t i = 0; i < clean.numel(); ++i) {
    mae_noisy += std::abs(noisy.data()[i] - clean.data()[i]);
    mae_den += std::abs(den.data()[i] - clean.data()[i]);
  }
  CHECK(mae_den < mae_noisy);
}

TEST_CASE("identical seeds produce identical checkpoints") {
  DenoiseConfig cfg = small_config();
  cfg.max_steps = 2;
  fs::remove_all("restore_da");
  fs::remove_all("restore_db");
  const DenoiseResult a = miqm::train_denoiser(cfg, "restore_da");
  const DenoiseResult b = miqm::train_denoiser(cfg, "restore_db");
  CHECK(a.final_loss == b.final_loss);
  CHECK(miqm::sha256_file(a.checkpoint) == miqm::sha256_file(b.checkpoint));
}

TEST_CASE("masked loss trains against frozen mask weights") {
  DenoiseConfig cfg = small_config();
  cfg.loss = "e-mae";
  cfg.emae_checkpoint = fixture_dir() + "/emae.miqm";
  cfg.max_steps = 2;
  const std::string before = miqm::sha256_file(cfg.emae_checkpoint);
  fs::remove_all("restore_emae");
  const DenoiseResult r = miqm::train_denoiser(cfg, "restore_emae");
  CHECK(r.steps == 2);
  CHECK(std::isfinite(r.final_loss));
  CHECK(r.final_loss != r.first_loss);  // gradients reached the denoiser
  CHECK(miqm::sha256_file(cfg.emae_checkpoint) == before);

  // The denoiser checkpoint carries only denoiser tensors.
  const miqm::CheckpointData ck = miqm::load_checkpoint(r.checkpoint);
  CHECK(ck.metric == "denoiser-e-mae");
  for (const auto& [name, t] : ck.tensors) {
    CHECK(name.rfind("dn.", 0) == 0);
  }

  // A checkpoint for some other metric is rejected as a mask source.
  DenoiseConfig bad = cfg;
  miqm::CheckpointData wrong = miqm::load_checkpoint(cfg.emae_checkpoint);
  wrong.metric = "ssim";
  miqm::save_checkpoint("restore_fixture/wrong.miqm", wrong);
  bad.emae_checkpoint = "restore_fixture/wrong.miqm";
  CHECK_THROWS_AS(miqm::train_denoiser(bad, "restore_bad"),
                  std::invalid_argument);
}

TEST_CASE("evaluation reports paired rows per sigma") {
  DenoiseConfig cfg = small_config();
  cfg.max_steps = 1;
  fs::remove_all("restore_eval_a");
  const DenoiseResult ra = miqm::train_denoiser(cfg, "restore_eval_a");
  cfg.loss = "e-mae";
  cfg.emae_checkpoint = fixture_dir() + "/emae.miqm";
  fs::remove_all("restore_eval_b");
  const DenoiseResult rb = miqm::train_denoiser(cfg, "restore_eval_b");

  std::vector<Tensor> test_images;
  test_images.push_back(miqm_test::synth_noise_image(16, 16, 80));
  test_images.push_back(miqm_test::synth_noise_image(16, 16, 81));
  const std::vector<std::pair<std::string, std::string>> ckpts = {
      {"mae", ra.checkpoint}, {"e-mae", rb.checkpoint}};

  const auto rows = miqm::evaluate_denoisers(
      ckpts, test_images, {15, 50}, fixture_dir() + "/emae.miqm");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].label == "mae");
  CHECK(rows[0].sigma == 15.0);
  CHECK(rows[3].label == "e-mae");
  CHECK(rows[3].sigma == 50.0);
  for (const auto& row : rows) {
    CHECK(row.psnr > 0.0);
    CHECK(row.ssim <= 1.0);
    CHECK(std::isnan(row.lpips));  // no feature backbone supplied
    CHECK(row.emae >= 0.0);
  }
  // More noise is harder for an identical denoiser.
  CHECK(rows[0].psnr > rows[1].psnr);

  CHECK(miqm::denoise_csv_header() == "loss,sigma,psnr,ssim,lpips,emae");
  const std::string line = miqm::denoise_csv_row(rows[0]);
  CHECK(std::count(line.begin(), line.end(), ',') == 5);
  CHECK(line.rfind("mae,15,", 0) == 0);

  // With a feature backbone the lpips column fills in.
  const std::string manifest = miqm_test::write_vgg_fixture("restore_vgg");
  const miqm::DeepContext ctx = miqm::DeepContext::load(manifest);
  const auto deep_rows = miqm::evaluate_denoisers(
      ckpts, test_images, {25}, fixture_dir() + "/emae.miqm", &ctx);
  REQUIRE(deep_rows.size() == 2);
  CHECK(std::isfinite(deep_rows[0].lpips));

  // Wrong checkpoint kind is rejected.
  CHECK_THROWS_AS(
      miqm::load_denoiser(fixture_dir() + "/emae.miqm"),
      std::invalid_argument);
}
