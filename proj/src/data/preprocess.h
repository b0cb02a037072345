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

#ifndef MIQM_DATA_PREPROCESS_H_
#define MIQM_DATA_PREPROCESS_H_

#include <string>

#include "core/image_io.h"
#include "core/resize.h"

namespace miqm {

// Canonical training/evaluation resolution: short image side.
constexpr int kShortSide = 224;

// Reads an image and resizes its short side to `short_side` (both up- and
// downscaling; a no-op when already there, so preprocessing is idempotent).
inline Tensor load_and_preprocess(const std::string& path,
                                  int short_side = kShortSide) {
  return resize_short_side(read_image(path), short_side);
}

}  // namespace miqm

#endif  // MIQM_DATA_PREPROCESS_H_
