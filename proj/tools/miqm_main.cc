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
// miqm: one binary for the whole toolkit.
//   train         learn a masking model for one metric on one dataset
//   eval          correlation benchmark, metrics x datasets -> CSV
//   errmap        render the error map of one (ref, dist) pair
//   maskviz       render the learned mask (optionally a contrast sweep)
//   ablate        level / reference-count / category studies
//   denoise-demo  train mae and e-mae denoisers, report the comparison
//
// Exit codes: 0 success (and --help), 2 bad usage or bad arguments,
// 1 runtime failure. Every flag can also come from a config file
// (flat key=value with # comments, section per subcommand); explicit
// flags win over file values. Each run writes its full effective
// configuration next to its outputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "data/dataset.h"
#include "data/preprocess.h"
#include "deep/deep_metrics.h"
#include "eval/benchmark.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"
#include "metrics/common.h"
#include "restore/denoiser.h"
#include "train/ablation.h"
#include "train/trainer.h"
#include "viz/render.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "miqm 0.1.0";

miqm::MetricId parse_metric(const std::string& name) {
  // "vgg" is accepted as shorthand for the layer-wise vgg-l1 metric.
  const auto id =
      miqm::metric_from_name(name == "vgg" ? "vgg-l1" : name);
  if (!id) {
    throw std::invalid_argument(
        "unknown metric '" + name +
        "' (expected mae, psnr, ssim, ms-ssim, flip, vgg, lpips or dists)");
  }
  return *id;
}

void require_exists(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::exists(path)) {
    throw std::invalid_argument(what + " not found: " + path);
  }
}

std::shared_ptr<const miqm::DeepContext> load_deep_if(
    const std::string& weights, miqm::MetricId id) {
  const bool needs =
      id == miqm::MetricId::kVggL1 || id == miqm::MetricId::kLpips ||
      id == miqm::MetricId::kDists;
  if (weights.empty()) {
    if (needs) {
      throw std::invalid_argument(
          "metric needs a feature backbone; pass --weights MANIFEST");
    }
    return nullptr;
  }
  require_exists(weights, "weights manifest");
  return std::make_shared<miqm::DeepContext>(
      miqm::DeepContext::load(weights));
}

// Effective configuration sidecar: everything needed to redo the run.
void write_effective_config(const CLI::App& app, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# " << kVersion << "\n";
  out << app.config_to_str(true, true);
}

// Restores "e-<metric>" from <dir>/<metric>.miqm; used by eval.
miqm::EnhancedMetric load_enhanced(
    const std::string& checkpoint,
    std::shared_ptr<const miqm::DeepContext> deep) {
  const miqm::CheckpointData ck = miqm::load_checkpoint(checkpoint);
  const auto id = miqm::metric_from_name(ck.metric);
  if (!id) {
    throw std::invalid_argument("checkpoint metric unknown: " + ck.metric);
  }
  miqm::EnhancedMetric em(*id, std::move(deep), ck.init_seed);
  miqm::restore_store(ck, &em.params());
  return em;
}

struct TrainArgs {
  std::string metric = "mae";
  std::string dataset = "kadid10k";
  std::string data_root;
  std::string out;
  std::string weights;
  std::uint64_t seed = 1;
  int epochs = 30;
  int batch = 4;
  double lr = 1e-4;
  double weight_decay = 1e-6;
  double val_fraction = 0.1;
  int short_side = miqm::kShortSide;
  std::int64_t max_steps = 0;
};

int run_train(const TrainArgs& a, const CLI::App& app) {
  require_exists(a.data_root, "data root");
  miqm::TrainConfig cfg;
  cfg.metric = parse_metric(a.metric);
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.weight_decay = a.weight_decay;
  cfg.val_fraction = a.val_fraction;
  cfg.short_side = a.short_side;
  cfg.max_steps = a.max_steps;
  const auto deep = load_deep_if(a.weights, cfg.metric);

  const miqm::Dataset ds = miqm::load_dataset(a.dataset, a.data_root);
  const miqm::SplitIndices split =
      miqm::holdout_by_reference(ds, cfg.val_fraction, cfg.seed);
  std::cout << "training " << a.metric << " on " << ds.name << " ("
            << split.train.size() << " train / " << split.val.size()
            << " val records)\n";
  const miqm::TrainResult r =
      miqm::train(cfg, ds, split, a.out, deep, &std::cout);
  write_effective_config(app, a.out + "/effective_config.txt");
  std::cout << "checkpoint: " << r.best_checkpoint << "\n";
  return 0;
}

struct EvalArgs {
  std::vector<std::string> datasets;
  std::vector<std::string> metrics = {"mae", "psnr", "ssim", "ms-ssim",
                                      "flip"};
  std::string data_root;
  std::string checkpoints;
  std::string report;
  std::string weights;
  int short_side = miqm::kShortSide;
};

int run_eval(const EvalArgs& a, const CLI::App& app) {
  if (a.datasets.empty()) {
    throw std::invalid_argument("empty dataset list");
  }
  require_exists(a.data_root, "data root");
  std::shared_ptr<const miqm::DeepContext> deep;
  if (!a.weights.empty()) {
    deep = load_deep_if(a.weights, miqm::MetricId::kLpips);
  }

  std::ofstream out(a.report, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + a.report);
  out << miqm::benchmark_csv_header() << "\n";
  for (const std::string& kind : a.datasets) {
    const miqm::Dataset ds =
        miqm::load_dataset(kind, a.data_root + "/" + kind);
    const std::vector<miqm::Scalar> mos = miqm::dataset_mos(ds);
    for (const std::string& label : a.metrics) {
      const bool enhanced = label.rfind("e-", 0) == 0;
      const std::string base = enhanced ? label.substr(2) : label;
      const miqm::MetricId id = parse_metric(base);
      if (deep == nullptr && (id == miqm::MetricId::kVggL1 ||
                              id == miqm::MetricId::kLpips ||
                              id == miqm::MetricId::kDists)) {
        throw std::invalid_argument("metric " + label +
                                    " needs --weights MANIFEST");
      }
      std::vector<miqm::Scalar> scores;
      if (enhanced) {
        const std::string ckpt =
            a.checkpoints + "/" + base + ".miqm";
        require_exists(ckpt, "checkpoint for " + label);
        const miqm::EnhancedMetric em = load_enhanced(ckpt, deep);
        scores = miqm::score_dataset(ds, em, a.short_side, &std::cout);
      } else {
        scores = miqm::score_dataset(ds, id, deep.get(), a.short_side,
                                     &std::cout);
      }
      const miqm::BenchmarkRow row = miqm::correlate_column(
          ds.name, label, std::move(scores), mos,
          miqm::metric_higher_better(id));
      out << miqm::benchmark_csv_row(row) << "\n";
      std::cout << ds.name << " " << label << ": plcc " << row.plcc
                << " srcc " << row.srcc << " krcc " << row.krcc << "\n";
    }
  }
  out.close();
  write_effective_config(app, a.report + ".config.txt");
  std::cout << "report: " << a.report << "\n";
  return 0;
}

struct VizArgs {
  std::string ref;
  std::string dist;
  std::string metric = "mae";
  std::string checkpoint;
  std::string out;
  std::string weights;
  std::string normalize = "auto";  // auto | none | sigmoid
  double sigmoid_k = 0;            // 0 = derive from the map's p95
  bool contrast_sweep = false;
};

std::pair<miqm::Tensor, miqm::Tensor> load_pair(const VizArgs& a) {
  require_exists(a.ref, "reference image");
  require_exists(a.dist, "distorted image");
  miqm::Tensor ref = miqm::read_image(a.ref);
  miqm::Tensor dist = miqm::read_image(a.dist);
  if (ref.h() != dist.h() || ref.w() != dist.w()) {
    throw std::invalid_argument("image sizes differ: " + a.ref + " is " +
                                std::to_string(ref.h()) + "x" +
                                std::to_string(ref.w()) + ", " + a.dist +
                                " is " + std::to_string(dist.h()) + "x" +
                                std::to_string(dist.w()));
  }
  return {std::move(ref), std::move(dist)};
}

miqm::RenderSpec viz_spec(const VizArgs& a, miqm::MetricId id,
                          const miqm::Tensor& map) {
  miqm::RenderSpec spec;
  spec.out_path = a.out;
  const bool unbounded =
      id == miqm::MetricId::kMae || id == miqm::MetricId::kVggL1;
  const bool sigmoid = a.normalize == "sigmoid" ||
                       (a.normalize == "auto" && unbounded);
  if (a.normalize != "auto" && a.normalize != "none" &&
      a.normalize != "sigmoid") {
    throw std::invalid_argument("unknown --normalize " + a.normalize);
  }
  if (sigmoid) {
    spec.normalization = miqm::Normalization::kSigmoid;
    spec.sigmoid_k = a.sigmoid_k > 0
                         ? a.sigmoid_k
                         : miqm::sigmoid_slope_for_p95(
                               miqm::percentile(map, 0.95));
  }
  return spec;
}

int run_errmap(const VizArgs& a, const CLI::App& app) {
  const auto [ref, dist] = load_pair(a);
  const miqm::MetricId id = parse_metric(a.metric);
  const auto deep = load_deep_if(a.weights, id);
  miqm::MetricResult result;
  if (a.checkpoint.empty()) {
    result = deep ? miqm::evaluate_deep(*deep, id, ref, dist)
                  : miqm::evaluate_classic(id, ref, dist);
  } else {
    require_exists(a.checkpoint, "checkpoint");
    const miqm::EnhancedMetric em = load_enhanced(a.checkpoint, deep);
    const miqm::EnhancedMetric::Result er = em.evaluate(ref, dist);
    result.score = er.score;
    result.error_map = er.error_map;
  }
  miqm::render_error_map(result, viz_spec(a, id, result.error_map));
  write_effective_config(app, a.out + ".config.txt");
  std::cout << "score: " << result.score << "\nerror map: " << a.out
            << "\n";
  return 0;
}

int run_maskviz(const VizArgs& a, const CLI::App& app) {
  const auto [ref, dist] = load_pair(a);
  const miqm::MetricId id = parse_metric(a.metric);
  const auto deep = load_deep_if(a.weights, id);
  std::unique_ptr<miqm::EnhancedMetric> em;
  if (a.checkpoint.empty()) {
    // No checkpoint: render the untrained model's masks (seed 1).
    em = std::make_unique<miqm::EnhancedMetric>(id, deep, 1);
  } else {
    require_exists(a.checkpoint, "checkpoint");
    em = std::make_unique<miqm::EnhancedMetric>(load_enhanced(a.checkpoint,
                                                              deep));
  }
  miqm::RenderSpec spec;
  spec.out_path = a.out;
  if (a.contrast_sweep) {
    const auto paths = miqm::contrast_sweep(*em, ref, dist, spec);
    for (const auto& p : paths) std::cout << "mask: " << p << "\n";
  } else {
    const miqm::EnhancedMetric::Result r = em->evaluate(ref, dist);
    if (r.masks.empty()) {
      throw std::runtime_error("model produced no masks");
    }
    miqm::render_mask(r.masks.front(), spec);
    std::cout << "mask: " << a.out << "\n";
  }
  write_effective_config(app, a.out + ".config.txt");
  return 0;
}

struct AblateArgs {
  std::string ablation;  // levels | refs | categories
  std::string metric = "mae";
  std::string train_dataset = "kadid10k";
  std::string train_root;
  std::vector<std::string> tests;  // kind=root
  std::string out;
  std::string weights;
  std::string group_json;
  std::vector<std::string> groups;
  std::vector<int> sizes;
  int runs = 3;
  std::uint64_t seed = 1;
  int epochs = 30;
  int batch = 4;
  double lr = 1e-4;
  double val_fraction = 0.1;
  int short_side = miqm::kShortSide;
};

int run_ablate(const AblateArgs& a, const CLI::App& app) {
  require_exists(a.train_root, "training data root");
  miqm::TrainConfig cfg;
  cfg.metric = parse_metric(a.metric);
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.val_fraction = a.val_fraction;
  cfg.short_side = a.short_side;
  const auto deep = load_deep_if(a.weights, cfg.metric);

  const miqm::Dataset train_ds =
      miqm::load_dataset(a.train_dataset, a.train_root);
  std::vector<miqm::TestSet> tests;
  for (const std::string& spec : a.tests) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--test expects KIND=ROOT, got " + spec);
    }
    const std::string kind = spec.substr(0, eq);
    const std::string root = spec.substr(eq + 1);
    require_exists(root, "test data root");
    tests.push_back({kind, miqm::load_dataset(kind, root)});
  }
  if (tests.empty()) {
    // Fall back to scoring on the training corpus.
    tests.push_back({train_ds.name, train_ds});
  }

  nlohmann::json report;
  if (a.ablation == "levels") {
    report = miqm::run_ablation_levels(cfg, train_ds, tests, a.out, deep,
                                       &std::cout);
  } else if (a.ablation == "refs") {
    if (a.sizes.empty()) {
      throw std::invalid_argument("--ablation refs needs --sizes");
    }
    report = miqm::run_ablation_refs(cfg, train_ds, tests, a.sizes, a.runs,
                                     a.out, deep, &std::cout);
  } else if (a.ablation == "categories") {
    require_exists(a.group_json, "group json");
    if (a.groups.empty()) {
      throw std::invalid_argument("--ablation categories needs --groups");
    }
    report = miqm::run_ablation_categories(cfg, train_ds, a.groups,
                                           a.group_json, tests, a.out, deep,
                                           &std::cout);
  } else {
    throw std::invalid_argument(
        "unknown --ablation (expected levels, refs or categories)");
  }
  const std::string path = a.out + "/report.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << report.dump(2) << "\n";
  write_effective_config(app, a.out + "/effective_config.txt");
  std::cout << "report: " << path << "\n";
  return 0;
}

struct DenoiseArgs {
  std::string train_dir;
  std::string test_dir;
  std::string emae_checkpoint;
  std::string out;
  std::string weights;
  std::vector<double> sigmas = {15, 25, 50, 60};
  double sigma_min = 0, sigma_max = 50;
  int epochs = 1;
  int patch = 40;
  int batch = 8;
  int patches_per_image = 4;
  double lr = 1e-3;
  int seed = 1;
  std::int64_t max_steps = 0;
};

int run_denoise_demo(const DenoiseArgs& a, const CLI::App& app) {
  require_exists(a.train_dir, "training image directory");
  require_exists(a.test_dir, "test image directory");
  require_exists(a.emae_checkpoint, "enhanced-mae checkpoint");
  std::shared_ptr<const miqm::DeepContext> deep;
  if (!a.weights.empty()) {
    deep = load_deep_if(a.weights, miqm::MetricId::kLpips);
  }

  miqm::DenoiseConfig cfg;
  cfg.sigma_min = a.sigma_min;
  cfg.sigma_max = a.sigma_max;
  cfg.train_dir = a.train_dir;
  cfg.emae_checkpoint = a.emae_checkpoint;
  cfg.epochs = a.epochs;
  cfg.patch = a.patch;
  cfg.batch = a.batch;
  cfg.patches_per_image = a.patches_per_image;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  cfg.max_steps = static_cast<int>(a.max_steps);

  cfg.loss = "mae";
  const miqm::DenoiseResult mae =
      miqm::train_denoiser(cfg, a.out + "/mae", &std::cout);
  cfg.loss = "e-mae";
  const miqm::DenoiseResult emae =
      miqm::train_denoiser(cfg, a.out + "/e-mae", &std::cout);

  std::vector<miqm::Tensor> test_images;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.test_dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const std::string ext = p.extension().string();
    if (ext == ".png" || ext == ".bmp" || ext == ".PNG" || ext == ".BMP") {
      test_images.push_back(miqm::read_image(p.string()));
    }
  }
  if (test_images.empty()) {
    throw std::invalid_argument("no test images in " + a.test_dir);
  }

  const std::vector<miqm::Scalar> sigmas(a.sigmas.begin(), a.sigmas.end());
  const auto rows = miqm::evaluate_denoisers(
      {{"mae", mae.checkpoint}, {"e-mae", emae.checkpoint}}, test_images,
      sigmas, a.emae_checkpoint, deep.get(), 123, &std::cout);

  const std::string path = a.out + "/denoise_report.csv";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << miqm::denoise_csv_header() << "\n";
  std::cout << miqm::denoise_csv_header() << "\n";
  for (const auto& row : rows) {
    out << miqm::denoise_csv_row(row) << "\n";
    std::cout << miqm::denoise_csv_row(row) << "\n";
  }
  out.close();
  write_effective_config(app, a.out + "/effective_config.txt");
  std::cout << "report: " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"image-quality metrics with learned visual masking"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "flat key=value config file; flags win");
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a masking model");
  train->add_option("--metric", train_args.metric,
                    "mae|psnr|ssim|ms-ssim|flip|vgg|lpips|dists");
  train->add_option("--dataset", train_args.dataset,
                    "kadid10k|tid2013|csiq|pipal|csv");
  train->add_option("--data-root", train_args.data_root, "dataset root")
      ->required();
  train->add_option("--out", train_args.out, "output directory")->required();
  train->add_option("--seed", train_args.seed, "rng seed");
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--batch", train_args.batch, "batch size");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--weight-decay", train_args.weight_decay,
                    "decoupled weight decay");
  train->add_option("--val-fraction", train_args.val_fraction,
                    "held-out reference fraction");
  train->add_option("--short-side", train_args.short_side,
                    "resize short side before scoring");
  train->add_option("--max-steps", train_args.max_steps,
                    "stop after N optimizer steps (0 = all epochs)");
  train->add_option("--weights", train_args.weights,
                    "feature backbone manifest (deep metrics)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "correlation benchmark");
  eval->add_option("--datasets", eval_args.datasets,
                   "dataset kinds, e.g. kadid10k,tid2013")
      ->required()
      ->delimiter(',');
  eval->add_option("--metrics", eval_args.metrics,
                   "metric labels; e-<metric> uses a checkpoint")
      ->delimiter(',');
  eval->add_option("--data-root", eval_args.data_root,
                   "directory containing one subdirectory per dataset kind")
      ->required();
  eval->add_option("--checkpoints", eval_args.checkpoints,
                   "directory of <metric>.miqm checkpoints");
  eval->add_option("--report", eval_args.report, "output CSV")->required();
  eval->add_option("--weights", eval_args.weights,
                   "feature backbone manifest");
  eval->add_option("--short-side", eval_args.short_side,
                   "resize short side before scoring");

  VizArgs errmap_args;
  CLI::App* errmap = app.add_subcommand("errmap", "render an error map");
  errmap->add_option("--ref", errmap_args.ref, "reference image")
      ->required();
  errmap->add_option("--dist", errmap_args.dist, "distorted image")
      ->required();
  errmap->add_option("--metric", errmap_args.metric, "metric id");
  errmap->add_option("--checkpoint", errmap_args.checkpoint,
                     "enhanced-metric checkpoint (optional)");
  errmap->add_option("--out", errmap_args.out, "output PNG")->required();
  errmap->add_option("--weights", errmap_args.weights,
                     "feature backbone manifest");
  errmap->add_option("--normalize", errmap_args.normalize,
                     "auto|none|sigmoid");
  errmap->add_option("--sigmoid-k", errmap_args.sigmoid_k,
                     "sigmoid slope (0 = derive from the map)");

  VizArgs mask_args;
  CLI::App* maskviz = app.add_subcommand("maskviz", "render a learned mask");
  maskviz->add_option("--ref", mask_args.ref, "reference image")->required();
  maskviz->add_option("--dist", mask_args.dist, "distorted image")
      ->required();
  maskviz->add_option("--metric", mask_args.metric, "metric id");
  maskviz->add_option("--checkpoint", mask_args.checkpoint,
                      "masking checkpoint (optional; untrained otherwise)");
  maskviz->add_option("--out", mask_args.out, "output PNG")->required();
  maskviz->add_option("--weights", mask_args.weights,
                      "feature backbone manifest");
  maskviz->add_flag("--contrast-sweep", mask_args.contrast_sweep,
                    "render masks at x0.5, x1 and x2 contrast");

  AblateArgs ablate_args;
  CLI::App* ablate = app.add_subcommand("ablate", "ablation studies");
  ablate->add_option("--ablation", ablate_args.ablation,
                     "levels|refs|categories")
      ->required();
  ablate->add_option("--metric", ablate_args.metric, "base metric");
  ablate->add_option("--train-dataset", ablate_args.train_dataset,
                     "training dataset kind");
  ablate->add_option("--train-root", ablate_args.train_root,
                     "training dataset root")
      ->required();
  ablate->add_option("--test", ablate_args.tests,
                     "test set as KIND=ROOT (repeatable)");
  ablate->add_option("--out", ablate_args.out, "output directory")
      ->required();
  ablate->add_option("--weights", ablate_args.weights,
                     "feature backbone manifest");
  ablate->add_option("--group-json", ablate_args.group_json,
                     "distortion-category groups (categories)");
  ablate->add_option("--groups", ablate_args.groups,
                     "category names (categories)")
      ->delimiter(',');
  ablate->add_option("--sizes", ablate_args.sizes,
                     "reference-subset sizes (refs)")
      ->delimiter(',');
  ablate->add_option("--runs", ablate_args.runs, "runs per size (refs)");
  ablate->add_option("--seed", ablate_args.seed, "rng seed");
  ablate->add_option("--epochs", ablate_args.epochs, "training epochs");
  ablate->add_option("--batch", ablate_args.batch, "batch size");
  ablate->add_option("--lr", ablate_args.lr, "learning rate");
  ablate->add_option("--val-fraction", ablate_args.val_fraction,
                     "held-out reference fraction");
  ablate->add_option("--short-side", ablate_args.short_side,
                     "resize short side before scoring");

  DenoiseArgs dn_args;
  CLI::App* dn = app.add_subcommand(
      "denoise-demo", "train mae and e-mae denoisers and compare");
  dn->add_option("--train-dir", dn_args.train_dir, "training images")
      ->required();
  dn->add_option("--test-dir", dn_args.test_dir, "test images")->required();
  dn->add_option("--emae-checkpoint", dn_args.emae_checkpoint,
                 "enhanced-mae checkpoint (frozen loss weights)")
      ->required();
  dn->add_option("--out", dn_args.out, "output directory")->required();
  dn->add_option("--weights", dn_args.weights,
                 "feature backbone manifest for the lpips column");
  dn->add_option("--sigmas", dn_args.sigmas, "evaluation noise levels")
      ->delimiter(',');
  dn->add_option("--sigma-min", dn_args.sigma_min, "training noise lower bound");
  dn->add_option("--sigma-max", dn_args.sigma_max, "training noise upper bound");
  dn->add_option("--epochs", dn_args.epochs, "training epochs");
  dn->add_option("--patch", dn_args.patch, "training patch size");
  dn->add_option("--batch", dn_args.batch, "batch size");
  dn->add_option("--patches-per-image", dn_args.patches_per_image,
                 "patches drawn per image per epoch");
  dn->add_option("--lr", dn_args.lr, "learning rate");
  dn->add_option("--seed", dn_args.seed, "rng seed");
  dn->add_option("--max-steps", dn_args.max_steps,
                 "stop after N optimizer steps (0 = all epochs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train) return run_train(train_args, app);
    if (*eval) return run_eval(eval_args, app);
    if (*errmap) return run_errmap(errmap_args, app);
    if (*maskviz) return run_maskviz(mask_args, app);
    if (*ablate) return run_ablate(ablate_args, app);
    if (*dn) return run_denoise_demo(dn_args, app);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "run 'miqm " << (argc > 1 ? argv[1] : "") << " --help'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
