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

#ifndef MIQM_CORE_RESIZE_H_
#define MIQM_CORE_RESIZE_H_

#include "core/tensor.h"

namespace miqm {

// Separable bilinear resample. When minifying, the triangle filter support
// grows with the scale factor (antialiasing); when magnifying it is plain
// bilinear. Borders replicate.
Tensor resize_bilinear(const Tensor& img, int out_h, int out_w);

// Scales so the short side equals short_side; the long side keeps the
// aspect ratio (rounded to nearest). Returns a copy when already at size.
Tensor resize_short_side(const Tensor& img, int short_side);

}  // namespace miqm

#endif  // MIQM_CORE_RESIZE_H_
