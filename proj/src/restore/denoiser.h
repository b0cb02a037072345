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
//
// AWGN-denoising demo that trains the same small residual CNN twice —
// once with plain MAE and once with masked MAE (the mask model loaded
// frozen from an image-quality checkpoint) — then scores both on held-out
// images at several noise levels. The point is to compare the losses, not
// the backbone, so the network is a compact 17-conv residual stack.

#ifndef MIQM_RESTORE_DENOISER_H_
#define MIQM_RESTORE_DENOISER_H_

#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "core/rng.h"
#include "core/tensor.h"
#include "deep/deep_metrics.h"
#include "nn/layers.h"

namespace miqm {

struct DenoiseConfig {
  // AWGN standard deviation is drawn per patch, uniform on an 8-bit scale
  // and applied as sigma/255; the training envelope is capped at 50.
  Scalar sigma_min = 0.0;
  Scalar sigma_max = 50.0;
  std::string loss = "mae";      // "mae" or "e-mae"
  std::string train_dir;         // directory of .png/.bmp training images
  std::string emae_checkpoint;   // required when loss == "e-mae"
  int epochs = 1;
  int patches_per_image = 4;
  int patch = 40;
  int batch = 8;
  Scalar learning_rate = 1e-3;
  int seed = 1;
  int max_steps = 0;  // 0 = run all epochs
};

// Residual stack: conv+relu, 15x(conv+relu), conv; output = input - residual.
// 64 channels throughout, 3x3 kernels, zero-pad same.
class Denoiser {
 public:
  explicit Denoiser(int seed);

  Var forward(const Var& noisy) const;
  // Convenience inference path; output clamped to [0,1].
  Tensor denoise(const Tensor& noisy) const;

  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  int seed() const { return seed_; }

  static constexpr int kLayers = 17;
  static constexpr int kChannels = 64;

 private:
  ParamStore store_;
  std::vector<Conv2dLayer> convs_;
  int seed_ = 0;
};

struct PatchSample {
  Tensor clean;
  Tensor noisy;
  Scalar sigma = 0;  // the sampled 8-bit-scale standard deviation
};

// Crops a random patch (shrunk to fit small images) and adds AWGN with
// sigma ~ U[sigma_min, sigma_max]; noisy is clamped to [0,1].
PatchSample sample_patch(const Tensor& image, const DenoiseConfig& cfg,
                         Rng& rng);

struct DenoiseResult {
  std::string checkpoint;
  std::string log_path;
  std::int64_t steps = 0;
  Scalar first_loss = 0;
  Scalar final_loss = 0;
  std::vector<Scalar> epoch_mean_loss;
};

// Trains per cfg and writes denoiser.miqm plus a step CSV into out_dir.
// The masked loss backpropagates through the frozen mask network into the
// denoiser only; mask gradients are discarded each step, and a parameter
// hash taken before and after training asserts the mask never moved.
DenoiseResult train_denoiser(const DenoiseConfig& cfg,
                             const std::string& out_dir,
                             std::ostream* log = nullptr);

// Rebuilds a denoiser from its checkpoint; loss_label receives the loss id
// the checkpoint was trained with ("mae" / "e-mae") when non-null.
Denoiser load_denoiser(const std::string& path,
                       std::string* loss_label = nullptr);

struct DenoiseEvalRow {
  std::string label;
  Scalar sigma = 0;
  Scalar psnr = 0;
  Scalar ssim = 0;
  Scalar lpips = 0;  // NaN when no feature backbone is supplied
  Scalar emae = 0;
};

// Scores each checkpoint on each test image at each sigma and averages.
// Noise is seeded per (sigma, image), so every denoiser sees identical
// noisy inputs and the comparison is paired. sigmas may exceed the
// training envelope (that is the generalization probe).
std::vector<DenoiseEvalRow> evaluate_denoisers(
    const std::vector<std::pair<std::string, std::string>>& labeled_ckpts,
    const std::vector<Tensor>& test_images, const std::vector<Scalar>& sigmas,
    const std::string& emae_checkpoint, const DeepContext* deep = nullptr,
    int eval_seed = 123, std::ostream* log = nullptr);

std::string denoise_csv_header();
std::string denoise_csv_row(const DenoiseEvalRow& row);

}  // namespace miqm

#endif  // MIQM_RESTORE_DENOISER_H_
