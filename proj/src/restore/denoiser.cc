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

#include "restore/denoiser.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "autodiff/ops.h"
#include "core/image_io.h"
#include "core/sha256.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"
#include "metrics/classic.h"
#include "nn/adam.h"

namespace fs = std::filesystem;

namespace miqm {

namespace {

void check_config(const DenoiseConfig& cfg) {
  if (!(cfg.sigma_min >= 0 && cfg.sigma_min <= cfg.sigma_max &&
        cfg.sigma_max <= 50.0)) {
    throw std::invalid_argument(
        "denoiser: sigma range must satisfy 0 <= min <= max <= 50");
  }
  if (cfg.loss != "mae" && cfg.loss != "e-mae") {
    throw std::invalid_argument("denoiser: loss must be mae or e-mae");
  }
  if (cfg.epochs <= 0 || cfg.batch <= 0 || cfg.patch <= 0 ||
      cfg.patches_per_image <= 0 || cfg.learning_rate <= 0) {
    throw std::invalid_argument("denoiser: non-positive hyperparameter");
  }
}

std::vector<std::string> list_images(const std::string& dir) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("denoiser: not a directory: " + dir);
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".bmp") paths.push_back(e.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw std::invalid_argument("denoiser: no training images in " + dir);
  }
  return paths;
}

// Frozen mask model for the masked loss; only mae-based checkpoints apply.
std::unique_ptr<EnhancedMetric> load_frozen_emae(const std::string& path) {
  if (path.empty()) {
    throw std::invalid_argument(
        "denoiser: the e-mae loss needs an enhanced-mae checkpoint");
  }
  const CheckpointData ck = load_checkpoint(path);
  const auto id = metric_from_name(ck.metric);
  if (!id || *id != MetricId::kMae) {
    throw std::invalid_argument(
        "denoiser: checkpoint metric is not mae: " + ck.metric);
  }
  auto em = std::make_unique<EnhancedMetric>(MetricId::kMae, nullptr,
                                             ck.init_seed);
  restore_store(ck, &em->params());
  return em;
}

// Frozen-weight guard: byte hash over every tensor in registration order.
std::string store_hash(const ParamStore& store) {
  std::string bytes;
  for (const Param& p : store.params()) {
    const Tensor& t = p.var.value();
    bytes.append(reinterpret_cast<const char*>(t.data()),
                 static_cast<std::size_t>(t.numel()) * sizeof(Scalar));
  }
  return sha256_hex(bytes.data(), bytes.size());
}

std::string config_digest(const DenoiseConfig& cfg,
                          const std::vector<std::string>& images) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "sigma=%.17g:%.17g loss=%s epochs=%d ppi=%d patch=%d "
                "batch=%d lr=%.17g seed=%d",
                cfg.sigma_min, cfg.sigma_max, cfg.loss.c_str(), cfg.epochs,
                cfg.patches_per_image, cfg.patch, cfg.batch,
                cfg.learning_rate, cfg.seed);
  std::string s = buf;
  for (const auto& p : images) s += "\n" + p;
  return sha256_hex(s.data(), s.size());
}

}  // namespace

Denoiser::Denoiser(int seed) : seed_(seed) {
  Rng rng = Rng::stream(static_cast<std::uint64_t>(seed), 5000);
  convs_.reserve(kLayers);
  for (int i = 1; i <= kLayers; ++i) {
    const int ic = i == 1 ? 3 : kChannels;
    const int oc = i == kLayers ? 3 : kChannels;
    convs_.emplace_back(store_, "dn.conv" + std::to_string(i), 3, 3, ic, oc,
                        rng);
  }
}

Var Denoiser::forward(const Var& noisy) const {
  Var x = noisy;
  for (int i = 0; i + 1 < kLayers; ++i) {
    x = relu(convs_[i].forward(x));
  }
  const Var residual = convs_[kLayers - 1].forward(x);
  return sub(noisy, residual);
}

Tensor Denoiser::denoise(const Tensor& noisy) const {
  Tensor out = forward(Var::constant(noisy)).value();
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    out.data()[i] = std::clamp<Scalar>(out.data()[i], 0, 1);
  }
  return out;
}

PatchSample sample_patch(const Tensor& image, const DenoiseConfig& cfg,
                         Rng& rng) {
  const int h = image.h(), w = image.w(), c = image.c();
  const int ph = std::min(cfg.patch, h), pw = std::min(cfg.patch, w);
  // Draw order is part of the determinism contract: sigma, y0, x0, pixels.
  PatchSample s;
  s.sigma = rng.uniform(cfg.sigma_min, cfg.sigma_max);
  const int y0 = static_cast<int>(rng.uniform_int(h - ph + 1));
  const int x0 = static_cast<int>(rng.uniform_int(w - pw + 1));
  s.clean = Tensor({ph, pw, c});
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        s.clean.at(y, x, ch) = image.at(y0 + y, x0 + x, ch);
      }
    }
  }
  s.noisy = s.clean;
  const Scalar sd = s.sigma / 255.0;
  for (std::int64_t i = 0; i < s.noisy.numel(); ++i) {
    s.noisy.data()[i] = std::clamp<Scalar>(
        s.noisy.data()[i] + sd * rng.normal(), 0, 1);
  }
  return s;
}

DenoiseResult train_denoiser(const DenoiseConfig& cfg,
                             const std::string& out_dir, std::ostream* log) {
  check_config(cfg);
  const std::vector<std::string> paths = list_images(cfg.train_dir);
  std::vector<Tensor> images;
  images.reserve(paths.size());
  for (const auto& p : paths) images.push_back(read_image(p));

  std::unique_ptr<EnhancedMetric> em;
  std::string frozen_hash;
  if (cfg.loss == "e-mae") {
    em = load_frozen_emae(cfg.emae_checkpoint);
    frozen_hash = store_hash(em->params());
  }

  fs::create_directories(out_dir);
  Denoiser net(cfg.seed);
  AdamConfig opt_cfg;
  opt_cfg.lr = cfg.learning_rate;
  opt_cfg.weight_decay = 0;
  AdamW opt(net.params(), opt_cfg);
  Rng rng = Rng::stream(static_cast<std::uint64_t>(cfg.seed), 4000);

  DenoiseResult res;
  res.log_path = out_dir + "/denoise_log.csv";
  std::ofstream csv(res.log_path, std::ios::trunc);
  csv << "step,epoch,loss\n";

  std::vector<int> plan;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (int k = 0; k < cfg.patches_per_image; ++k) {
      plan.push_back(static_cast<int>(i));
    }
  }

  bool capped = false;
  int epochs_done = 0;
  for (int epoch = 0; epoch < cfg.epochs && !capped; ++epoch) {
    rng.shuffle(plan);
    Scalar epoch_loss = 0;
    int epoch_steps = 0;
    for (std::size_t lo = 0; lo < plan.size() && !capped;
         lo += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t hi =
          std::min(plan.size(), lo + static_cast<std::size_t>(cfg.batch));
      const Scalar inv = Scalar(1) / static_cast<Scalar>(hi - lo);
      net.params().zero_grad();
      if (em) em->params().zero_grad();
      Scalar batch_loss = 0;
      for (std::size_t k = lo; k < hi; ++k) {
        const PatchSample s = sample_patch(images[plan[k]], cfg, rng);
        const Var den = net.forward(Var::constant(s.noisy));
        const Var clean = Var::constant(s.clean);
        Var sample_loss =
            em ? em->build(clean, den).score
               : mean_all(vabs(sub(den, clean)));
        sample_loss = mul_scalar(sample_loss, inv);
        backward(sample_loss);
        batch_loss += sample_loss.item();
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("denoiser: non-finite loss at step " +
                                 std::to_string(res.steps));
      }
      opt.step();
      if (res.steps == 0) res.first_loss = batch_loss;
      res.final_loss = batch_loss;
      ++res.steps;
      epoch_loss += batch_loss;
      ++epoch_steps;
      csv << res.steps << "," << epoch << "," << batch_loss << "\n";
      if (cfg.max_steps > 0 && res.steps >= cfg.max_steps) capped = true;
    }
    if (epoch_steps > 0) {
      res.epoch_mean_loss.push_back(epoch_loss / epoch_steps);
      epochs_done = epoch + 1;
      if (log) {
        *log << "denoise epoch " << epoch << " done, mean loss "
             << res.epoch_mean_loss.back() << "\n";
      }
    }
  }

  if (em && store_hash(em->params()) != frozen_hash) {
    throw std::logic_error("denoiser: frozen mask weights changed");
  }

  CheckpointData ck;
  ck.metric = "denoiser-" + cfg.loss;
  ck.layers = {"dn"};
  ck.init_seed = static_cast<std::uint64_t>(cfg.seed);
  ck.config_digest = config_digest(cfg, paths);
  ck.epoch = epochs_done - 1;
  ck.step = res.steps;
  append_store(net.params(), &ck);
  res.checkpoint = out_dir + "/denoiser.miqm";
  save_checkpoint(res.checkpoint, ck);
  return res;
}

Denoiser load_denoiser(const std::string& path, std::string* loss_label) {
  const CheckpointData ck = load_checkpoint(path);
  const std::string prefix = "denoiser-";
  if (ck.metric.compare(0, prefix.size(), prefix) != 0) {
    throw std::invalid_argument("not a denoiser checkpoint: " + ck.metric);
  }
  if (loss_label) *loss_label = ck.metric.substr(prefix.size());
  Denoiser net(static_cast<int>(ck.init_seed));
  restore_store(ck, &net.params());
  return net;
}

std::vector<DenoiseEvalRow> evaluate_denoisers(
    const std::vector<std::pair<std::string, std::string>>& labeled_ckpts,
    const std::vector<Tensor>& test_images, const std::vector<Scalar>& sigmas,
    const std::string& emae_checkpoint, const DeepContext* deep,
    int eval_seed, std::ostream* log) {
  if (test_images.empty()) {
    throw std::invalid_argument("evaluate_denoisers: no test images");
  }
  std::unique_ptr<EnhancedMetric> em = load_frozen_emae(emae_checkpoint);

  // One noisy realization per (sigma, image), shared by all denoisers so
  // the comparison is paired.
  std::vector<std::vector<Tensor>> noisy(sigmas.size());
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    noisy[si].reserve(test_images.size());
    for (std::size_t ii = 0; ii < test_images.size(); ++ii) {
      Rng rng = Rng::stream(static_cast<std::uint64_t>(eval_seed),
                            7000 + 100 * si + ii);
      Tensor n = test_images[ii];
      const Scalar sd = sigmas[si] / 255.0;
      for (std::int64_t i = 0; i < n.numel(); ++i) {
        n.data()[i] =
            std::clamp<Scalar>(n.data()[i] + sd * rng.normal(), 0, 1);
      }
      noisy[si].push_back(std::move(n));
    }
  }

  std::vector<DenoiseEvalRow> rows;
  for (const auto& [label, ckpt] : labeled_ckpts) {
    const Denoiser net = load_denoiser(ckpt);
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
      DenoiseEvalRow row;
      row.label = label;
      row.sigma = sigmas[si];
      Scalar lpips_sum = 0;
      for (std::size_t ii = 0; ii < test_images.size(); ++ii) {
        const Tensor& clean = test_images[ii];
        const Tensor den = net.denoise(noisy[si][ii]);
        row.psnr += evaluate_classic(MetricId::kPsnr, clean, den).score;
        row.ssim += evaluate_classic(MetricId::kSsim, clean, den).score;
        if (deep) {
          lpips_sum +=
              evaluate_deep(*deep, MetricId::kLpips, clean, den).score;
        }
        row.emae += em->evaluate(clean, den).score;
      }
      const Scalar n = static_cast<Scalar>(test_images.size());
      row.psnr /= n;
      row.ssim /= n;
      row.lpips = deep ? lpips_sum / n : std::nan("");
      row.emae /= n;
      rows.push_back(row);
      if (log) {
        *log << "denoise eval " << label << " sigma " << sigmas[si]
             << " done\n";
      }
    }
  }
  return rows;
}

std::string denoise_csv_header() { return "loss,sigma,psnr,ssim,lpips,emae"; }

std::string denoise_csv_row(const DenoiseEvalRow& row) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s,%g,%.6f,%.6f,%.6f,%.6f",
                row.label.c_str(), row.sigma, row.psnr, row.ssim, row.lpips,
                row.emae);
  return buf;
}

}  // namespace miqm
