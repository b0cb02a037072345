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

#ifndef MIQM_TRAIN_ABLATION_H_
#define MIQM_TRAIN_ABLATION_H_

#include <json.hpp>

#include "train/trainer.h"

namespace miqm {

// A named evaluation set for ablation reports (e.g. a dataset or one of
// its distortion-category slices).
struct TestSet {
  std::string name;
  Dataset ds;
};

// Records of ds restricted to the given reference ids.
Dataset subset_by_refs(const Dataset& ds, const std::vector<int>& refs);

// Loads a checkpoint into a fresh enhanced metric and reports its SRCC
// (oriented so higher is better) on the test set.
Scalar eval_checkpoint_srcc(const std::string& checkpoint_path,
                            const Dataset& test,
                            std::shared_ptr<const DeepContext> deep,
                            int short_side);

// Trains six variants (single distortion levels 1..5 plus all levels) and
// reports SRCC per variant per test set.
nlohmann::json run_ablation_levels(const TrainConfig& base,
                                   const Dataset& train_ds,
                                   const std::vector<TestSet>& tests,
                                   const std::string& out_dir,
                                   std::shared_ptr<const DeepContext> deep,
                                   std::ostream* log = nullptr);

// Trains on random reference subsets of the given sizes (runs_per_size
// repeats with different subsets and seeds; a size covering every
// reference runs once) and reports mean and sample std SRCC per size.
nlohmann::json run_ablation_refs(const TrainConfig& base,
                                 const Dataset& train_ds,
                                 const std::vector<TestSet>& tests,
                                 const std::vector<int>& sizes,
                                 int runs_per_size, const std::string& out_dir,
                                 std::shared_ptr<const DeepContext> deep,
                                 std::ostream* log = nullptr);

// Trains one variant per distortion-category group (ids resolved against
// group_json; "all" trains on everything) and reports SRCC per test set,
// with an untrained base-metric row first.
nlohmann::json run_ablation_categories(const TrainConfig& base,
                                       const Dataset& train_ds,
                                       const std::vector<std::string>& groups,
                                       const std::string& group_json,
                                       const std::vector<TestSet>& tests,
                                       const std::string& out_dir,
                                       std::shared_ptr<const DeepContext> deep,
                                       std::ostream* log = nullptr);

}  // namespace miqm

#endif  // MIQM_TRAIN_ABLATION_H_
