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

#ifndef MIQM_VIZ_COLORMAP_H_
#define MIQM_VIZ_COLORMAP_H_

#include <array>
#include <cstdint>
#include <string>

#include "core/tensor.h"

namespace miqm {

// Fixed 256-entry dark-to-bright ramp (the familiar black-purple-orange
// "magma" table), pinned in source so renders are byte-identical across
// platforms. Entry 0 is near-black, entry 255 near-white.
const std::array<std::array<std::uint8_t, 3>, 256>& magma_table();

// Byte index for a normalized value; clamps to [0,1] first.
int colormap_index(Scalar v);

// Maps a [H,W] or [H,W,1] tensor of normalized values to [H,W,3] RGB in
// [0,1]. id is "magma" or "gray"; anything else throws std::invalid_argument.
Tensor apply_colormap(const Tensor& map, const std::string& id);

}  // namespace miqm

#endif  // MIQM_VIZ_COLORMAP_H_
