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

#ifndef MIQM_DEEP_WEIGHTS_H_
#define MIQM_DEEP_WEIGHTS_H_

#include <map>
#include <string>
#include <vector>

#include "core/tensor.h"

namespace miqm {

// Pretrained weights are never bundled; they live in a directory with a
// JSON manifest mapping tensor names to raw little-endian float32 blobs:
//
//   {
//     "format": "miqm-weights-v1",
//     "tensors": {
//       "conv1_1.w": {"file": "conv1_1_w.bin", "byte_length": 6912,
//                      "sha256": "...", "shape": [3,3,3,64],
//                      "dtype": "float32"},
//       ...
//     }
//   }
//
// Conv kernels use [KH,KW,IC,OC] layout, dense kernels [IN,OUT]. See
// tools/export_backbone_weights.py for producing a manifest from the
// published torchvision/LPIPS/DISTS checkpoints.

struct WeightEntry {
  std::string file;
  std::int64_t byte_length = 0;
  std::string sha256;
  std::vector<int> shape;
};

class WeightManifest {
 public:
  static WeightManifest load(const std::string& manifest_path);

  bool has(const std::string& name) const;
  std::vector<std::string> names() const;
  // Reads the blob, checks length and sha256, converts to double.
  Tensor tensor(const std::string& name) const;

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::map<std::string, WeightEntry> entries_;
};

// Writes tensors as float32 blobs plus a manifest (used by tests to build
// fixtures; the Python exporter mirrors this format).
void write_weight_manifest(const std::string& dir,
                           const std::string& manifest_name,
                           const std::map<std::string, Tensor>& tensors);

}  // namespace miqm

#endif  // MIQM_DEEP_WEIGHTS_H_
