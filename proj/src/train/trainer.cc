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

#include "train/trainer.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "core/sha256.h"
#include "eval/benchmark.h"
#include "eval/correlation.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"
#include "nn/adam.h"

namespace miqm {

namespace {

std::string records_digest(const Dataset& ds, const SplitIndices& split) {
  std::ostringstream s;
  const auto emit = [&s, &ds](const std::vector<int>& idx) {
    for (int i : idx) {
      const QualityRecord& r = ds.records[i];
      char mos[32];
      std::snprintf(mos, sizeof(mos), "%.17g", r.mos);
      s << r.ref_path << "|" << r.dist_path << "|" << mos << ";";
    }
  };
  emit(split.train);
  s << "/";
  emit(split.val);
  const std::string text = s.str();
  return sha256_hex(text.data(), text.size());
}

// Rounds every parameter and moment through float32. Keeping the mutable
// state on the float32 grid makes checkpoint writes lossless, which is what
// makes resumed runs bitwise identical to uninterrupted ones.
void quantize_state(ParamStore* store, AdamW* adam) {
  for (Param& p : store->params()) {
    Tensor& t = p.var.mutable_value();
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      t[i] = static_cast<Scalar>(static_cast<float>(t[i]));
    }
  }
  for (auto& [name, t] : adam->moments()) {
    (void)name;
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      t[i] = static_cast<Scalar>(static_cast<float>(t[i]));
    }
  }
}

struct Saver {
  const TrainConfig* cfg;
  const EnhancedMetric* em;
  const ParamStore* store;
  AdamW* adam;
  std::string digest;
  std::int64_t spe = 0;

  void save(const std::string& path, std::int64_t step, Scalar best_val,
            bool has_best_val) const {
    CheckpointData ck;
    ck.metric = metric_name(cfg->metric);
    ck.layers = em->generator_names();
    ck.init_seed = cfg->seed;
    ck.config_digest = digest;
    ck.epoch = static_cast<int>(step / spe) - 1;  // last fully finished epoch
    ck.step = step;
    ck.best_val = best_val;
    ck.has_best_val = has_best_val;
    append_store(*store, &ck);
    for (const auto& [name, t] : adam->moments()) {
      ck.tensors.emplace_back("opt." + name, t);
    }
    save_checkpoint(path, ck);
  }
};

Scalar validate_srcc(const EnhancedMetric& em, const Dataset& ds,
                     const SplitIndices& split, int short_side) {
  std::vector<Scalar> scores, mos;
  std::unordered_map<std::string, Tensor> refs;
  for (int i : split.val) {
    const QualityRecord& rec = ds.records[i];
    auto it = refs.find(rec.ref_path);
    if (it == refs.end()) {
      it = refs.emplace(rec.ref_path,
                        load_and_preprocess(rec.ref_path, short_side))
               .first;
    }
    const Tensor dist = load_and_preprocess(rec.dist_path, short_side);
    Scalar s = em.evaluate(it->second, dist).score;
    if (!metric_higher_better(em.metric())) s = -s;
    scores.push_back(s);
    mos.push_back(rec.mos);
  }
  if (scores.size() < 2) return 0;
  return srcc(scores, mos);
}

}  // namespace

std::string train_config_digest(const TrainConfig& cfg, const Dataset& ds,
                                const SplitIndices& split) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "miqm-train-v1|metric=%s|lr=%.17g|wd=%.17g|batch=%d|epochs=%d"
                "|seed=%llu|short=%d|valfrac=%.17g|ppd=%.17g|data=",
                metric_name(cfg.metric), cfg.learning_rate, cfg.weight_decay,
                cfg.batch_size, cfg.epochs,
                static_cast<unsigned long long>(cfg.seed), cfg.short_side,
                cfg.val_fraction, cfg.flip_ppd);
  const std::string text = std::string(buf) + records_digest(ds, split);
  return sha256_hex(text.data(), text.size());
}

std::int64_t steps_per_epoch(std::int64_t n_train, int batch_size) {
  return (n_train + batch_size - 1) / batch_size;
}

TrainResult train(const TrainConfig& cfg, const Dataset& ds,
                  const SplitIndices& split, const std::string& out_dir,
                  std::shared_ptr<const DeepContext> deep, std::ostream* log) {
  if (split.train.empty()) {
    throw std::invalid_argument("train: empty training split");
  }
  if (cfg.batch_size <= 0 || cfg.epochs <= 0 || cfg.learning_rate <= 0) {
    throw std::invalid_argument("train: hyperparameters must be positive");
  }
  std::filesystem::create_directories(out_dir);

  const std::string digest = train_config_digest(cfg, ds, split);
  const std::int64_t n_train = static_cast<std::int64_t>(split.train.size());
  const std::int64_t spe = steps_per_epoch(n_train, cfg.batch_size);

  EnhancedMetric em(cfg.metric, deep, cfg.seed, cfg.flip_ppd);
  Rng scaler_rng = Rng::stream(cfg.seed, 2000);
  ScalerNetwork scaler(em.params(), "s", scaler_rng);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.weight_decay;
  AdamW adam(em.params(), adam_cfg);

  TrainResult result;
  result.last_checkpoint = out_dir + "/checkpoint_last.miqm";
  result.best_checkpoint = out_dir + "/checkpoint_best.miqm";
  result.log_path = out_dir + "/train_log.csv";

  std::int64_t step = 0;
  Scalar best_val = 0;
  bool has_best = false;
  const bool fresh = !std::filesystem::exists(result.last_checkpoint);
  if (!fresh) {
    const CheckpointData ck = load_checkpoint(result.last_checkpoint);
    if (ck.config_digest != digest) {
      throw std::runtime_error(
          "train: checkpoint in " + out_dir +
          " belongs to a different config/data; refusing to resume");
    }
    restore_store(ck, &em.params());
    std::unordered_map<std::string, const Tensor*> by_name;
    for (const auto& [name, t] : ck.tensors) by_name.emplace(name, &t);
    for (auto& [name, t] : adam.moments()) {
      const auto it = by_name.find("opt." + name);
      if (it == by_name.end()) {
        throw std::runtime_error("train: checkpoint misses optimizer state " +
                                 name);
      }
      t = *it->second;
    }
    step = ck.step;
    adam.set_step_count(step);
    best_val = ck.best_val;
    has_best = ck.has_best_val;
    if (log != nullptr) {
      (*log) << "resuming from step " << step << "\n";
    }
  }

  std::ofstream csv(result.log_path, fresh ? std::ios::trunc : std::ios::app);
  if (fresh) csv << "step,epoch,loss,val_srcc\n";

  const Saver saver{&cfg, &em, &em.params(), &adam, digest, spe};
  std::unordered_map<std::string, Tensor> ref_cache;
  const auto load_ref = [&](const std::string& path) -> const Tensor& {
    auto it = ref_cache.find(path);
    if (it == ref_cache.end()) {
      it = ref_cache.emplace(path, load_and_preprocess(path, cfg.short_side))
               .first;
    }
    return it->second;
  };

  bool first_logged = false;
  bool capped = cfg.max_steps > 0 && step >= cfg.max_steps;
  const std::int64_t total_steps = spe * cfg.epochs;
  for (std::int64_t epoch = step / spe; epoch < cfg.epochs && !capped;
       ++epoch) {
    std::vector<int> order(split.train.begin(), split.train.end());
    Rng shuffle_rng = Rng::stream(cfg.seed, 10000 +epoch);
    shuffle_rng.shuffle(order);

    Scalar epoch_loss = 0;
    std::int64_t epoch_batches = 0;
    for (std::int64_t b = step % spe; b < spe; ++b) {
      const std::int64_t lo = b * cfg.batch_size;
      const std::int64_t hi = std::min(lo + cfg.batch_size, n_train);
      const Scalar inv = Scalar(1) / Scalar(hi - lo);
      em.params().zero_grad();
      Scalar batch_loss = 0;
      for (std::int64_t k = lo; k < hi; ++k) {
        const QualityRecord& rec = ds.records[order[k]];
        const Var ref = Var::constant(load_ref(rec.ref_path));
        const Var dist =
            Var::constant(load_and_preprocess(rec.dist_path, cfg.short_side));
        Var loss = enhanced_training_loss(em, scaler, ref, dist, rec.mos);
        loss = mul_scalar(loss, inv);
        backward(loss);
        batch_loss += loss.item();
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at step " << (step + 1) << " (batch";
        for (std::int64_t k = lo; k < hi; ++k) {
          msg << " " << ds.records[order[k]].dist_path;
        }
        msg << "); last good checkpoint retained";
        throw std::runtime_error(msg.str());
      }
      adam.step();
      quantize_state(&em.params(), &adam);
      ++step;
      epoch_loss += batch_loss;
      ++epoch_batches;
      csv << step << "," << epoch << "," << batch_loss << ",\n";
      if (!first_logged) {
        result.first_loss = batch_loss;
        first_logged = true;
      }
      result.final_loss = batch_loss;
      if (cfg.max_steps > 0 && step >= cfg.max_steps) {
        capped = true;
        break;
      }
    }

    if (step % spe == 0 && step > 0 && epoch_batches > 0) {
      // Epoch finished: validate, track the best snapshot, save progress.
      const Scalar mean_loss = epoch_loss / Scalar(epoch_batches);
      result.epoch_mean_loss.push_back(mean_loss);
      Scalar val = 0;
      const bool has_val_set = !split.val.empty();
      if (has_val_set) {
        val = validate_srcc(em, ds, split, cfg.short_side);
        result.has_val = true;
        if (!has_best || val > best_val) {
          best_val = val;
          has_best = true;
          saver.save(result.best_checkpoint, step, best_val, true);
        }
      }
      saver.save(result.last_checkpoint, step, best_val, has_best);
      csv << step << "," << epoch << "," << mean_loss << ","
          << (has_val_set ? std::to_string(val) : std::string()) << "\n";
      csv.flush();
      if (log != nullptr) {
        (*log) << "epoch " << epoch << " done: step " << step << "/"
               << total_steps << " loss " << mean_loss;
        if (has_val_set) (*log) << " val_srcc " << val;
        (*log) << "\n";
        log->flush();
      }
    } else if (capped) {
      saver.save(result.last_checkpoint, step, best_val, has_best);
      csv.flush();
      if (log != nullptr) {
        (*log) << "stopped at step cap " << step << "\n";
      }
    }
  }

  result.steps = step;
  result.epochs_done = static_cast<int>(step / spe);
  result.best_val_srcc = best_val;
  if (!has_best) result.best_checkpoint = result.last_checkpoint;
  return result;
}

}  // namespace miqm
