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

#ifndef MIQM_DATA_DATASET_H_
#define MIQM_DATA_DATASET_H_

#include <string>
#include <vector>

#include "core/rng.h"
#include "core/tensor.h"

namespace miqm {

// One annotated reference/distorted pair. mos is normalized to [0,1] with
// higher meaning better quality; raw_score keeps the annotation file value.
struct QualityRecord {
  std::string ref_path;
  std::string dist_path;
  Scalar mos = 0;
  Scalar raw_score = 0;
  int ref_id = -1;      // scene identifier within the dataset
  int distortion = -1;  // 1-based distortion type when the layout encodes it
  int level = -1;       // 1-based distortion level when encoded
};

struct Dataset {
  std::string name;
  std::string root;
  std::vector<QualityRecord> records;
};

// Directory layouts:
//   kadid10k: <root>/images/I<rr>_<tt>_<ll>.png + <root>/dmos.csv
//             (dist_img,ref_img,dmos,var; dmos in [1,5], higher better)
//   tid2013:  <root>/mos_with_names.txt ("<mos> <dist>.bmp"; mos in [0,9]),
//             <root>/reference_images/, <root>/distorted_images/
//   csiq:     <root>/csiq_dmos.csv (dis_img,ref_img,dmos; paths relative to
//             root, dmos in [0,1] lower better)
//   pipal:    <root>/Train_Ref/, <root>/Distortion_*/, <root>/Train_Label/
//             (per-reference "name,elo" lines; empirical score bounds)
Dataset load_kadid(const std::string& root);
Dataset load_tid2013(const std::string& root);
Dataset load_csiq(const std::string& root);
Dataset load_pipal(const std::string& root);
// Generic annotation list: header "ref_path,dist_path,score", paths
// relative to the CSV's directory; scores min-max normalized, higher
// assumed better.
Dataset load_csv(const std::string& csv_path);
// kind: kadid10k | tid2013 | csiq | pipal | csv.
Dataset load_dataset(const std::string& kind, const std::string& root);

// Unique ref_ids in ascending order.
std::vector<int> unique_refs(const Dataset& ds);

// Record indices split so no reference appears on both sides. The holdout
// takes floor(fraction * #refs) references (at least one), chosen by a
// seeded shuffle of the sorted reference list.
struct SplitIndices {
  std::vector<int> train;
  std::vector<int> val;
};
SplitIndices holdout_by_reference(const Dataset& ds, Scalar val_fraction,
                                  std::uint64_t seed);

// Keeps records matching every given constraint; empty vectors and
// max_refs < 0 mean "no constraint". max_refs keeps the first N unique
// references in ascending ref_id order.
struct DatasetFilter {
  std::vector<int> levels;
  std::vector<int> distortions;
  int max_refs = -1;
};
Dataset filter_dataset(const Dataset& ds, const DatasetFilter& filter);

// Distortion-type ids for a named category group ("noise", "blur", ...)
// from a JSON file {"noise": [...], "blur": [...]}. Group names may be
// combined with '&' (union); "all" means no constraint (empty result).
std::vector<int> category_distortions(const std::string& json_path,
                                      const std::string& category);

}  // namespace miqm

#endif  // MIQM_DATA_DATASET_H_
