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

#ifndef MIQM_TRAIN_TRAINER_H_
#define MIQM_TRAIN_TRAINER_H_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "data/dataset.h"
#include "data/preprocess.h"
#include "deep/deep_metrics.h"
#include "metrics/common.h"
#include "metrics/flip.h"

namespace miqm {

struct TrainConfig {
  MetricId metric = MetricId::kMae;
  Scalar learning_rate = 1e-4;
  Scalar weight_decay = 1e-6;
  int batch_size = 4;  // gradient accumulation; each sample loss scaled 1/batch
  int epochs = 30;
  std::uint64_t seed = 1;
  int short_side = kShortSide;
  // Stop after this many optimizer steps (0 = run all epochs). Not part of
  // the config digest: a capped run is the same run, interrupted.
  std::int64_t max_steps = 0;
  Scalar val_fraction = 0.1;  // fraction of references held out by the caller
  Scalar flip_ppd = kFlipDefaultPpd;
};

// Digest binding a run to its config and data; stored in checkpoints and
// verified on resume so two different runs can never be mixed up.
std::string train_config_digest(const TrainConfig& cfg, const Dataset& ds,
                                const SplitIndices& split);

std::int64_t steps_per_epoch(std::int64_t n_train, int batch_size);

struct TrainResult {
  std::string last_checkpoint;
  std::string best_checkpoint;  // equals last_checkpoint without validation
  std::string log_path;
  std::int64_t steps = 0;
  int epochs_done = 0;  // fully finished epochs overall
  bool has_val = false;
  Scalar best_val_srcc = 0;
  Scalar first_loss = 0;  // first and last optimizer-step loss of this call
  Scalar final_loss = 0;
  std::vector<Scalar> epoch_mean_loss;  // epochs finished during this call
};

// Trains the mask generator(s) and scaler for cfg.metric on ds restricted
// to split.train, validating on split.val after each epoch (SRCC of the
// enhanced score against MOS). Writes checkpoint_last.miqm each epoch (and
// on a max_steps stop), checkpoint_best.miqm on validation improvement, and
// appends to train_log.csv (`step,epoch,loss,val_srcc`; per-step rows leave
// val_srcc empty, epoch rows carry the epoch mean loss). Resumes from
// checkpoint_last.miqm when present (the config digest must match).
//
// All mutable training state is kept on the float32 grid (values are
// quantized after every optimizer step), so checkpoints are lossless and a
// resumed run is bitwise identical to an uninterrupted one.
//
// A non-finite loss aborts with the batch identified in the error; the last
// written checkpoint stays on disk.
TrainResult train(const TrainConfig& cfg, const Dataset& ds,
                  const SplitIndices& split, const std::string& out_dir,
                  std::shared_ptr<const DeepContext> deep = nullptr,
                  std::ostream* log = nullptr);

}  // namespace miqm

#endif  // MIQM_TRAIN_TRAINER_H_
