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

#ifndef MIQM_MASKING_CHECKPOINT_H_
#define MIQM_MASKING_CHECKPOINT_H_

#include <string>
#include <utility>
#include <vector>

#include "core/tensor.h"
#include "nn/layers.h"

namespace miqm {

// Checkpoint file layout:
//   bytes 0..7   magic "MIQM0001"
//   then         a UTF-8 JSON manifest (readable with `istream >> json`)
//   then         zero padding up to the 64-byte-aligned data section
//   then         raw little-endian float32 tensors, each at a 64-byte-
//                aligned offset relative to the data section start
// The manifest records per-tensor dtype/shape/offset plus run metadata
// (metric, generator names, init seed, config digest, progress counters).
// Tensors are laid out in name order; writing the same state twice yields
// byte-identical files. load_checkpoint returns tensors in that order.

inline constexpr char kCheckpointMagic[] = "MIQM0001";

struct CheckpointData {
  std::string metric;
  std::vector<std::string> layers;
  std::uint64_t init_seed = 0;
  std::string config_digest;
  int epoch = -1;           // last finished epoch, -1 before training
  std::int64_t step = 0;    // optimizer steps taken
  Scalar best_val = 0;      // validation score of the best epoch
  bool has_best_val = false;
  std::vector<std::pair<std::string, Tensor>> tensors;  // ordered
};

void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

// Appends every parameter of the store (values rounded to float32 when
// written) in registration order.
void append_store(const ParamStore& store, CheckpointData* out);
// Restores parameters by name; throws on missing names or shape mismatch.
void restore_store(const CheckpointData& data, ParamStore* store);

}  // namespace miqm

#endif  // MIQM_MASKING_CHECKPOINT_H_
