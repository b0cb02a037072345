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

#ifndef MIQM_CORE_IMAGE_IO_H_
#define MIQM_CORE_IMAGE_IO_H_

#include <string>

#include "core/tensor.h"

namespace miqm {

// Images are [H,W,3] (or [H,W,1] for grayscale writes), display-encoded
// sRGB, values in [0,1]. 8-bit files map through v / 255.

// Reads a PNG or BMP by extension; always returns [H,W,3].
Tensor read_image(const std::string& path);

Tensor read_png(const std::string& path);
// 24-bit uncompressed BMP (BITMAPINFOHEADER), bottom-up or top-down.
Tensor read_bmp(const std::string& path);

// Writes 8-bit PNG. img must be [H,W,1] (gray) or [H,W,3]; values are
// clamped to [0,1] and rounded. Output bytes are deterministic.
void write_png(const std::string& path, const Tensor& img);

// Writes 24-bit uncompressed bottom-up BMP; same input contract.
void write_bmp(const std::string& path, const Tensor& img);

}  // namespace miqm

#endif  // MIQM_CORE_IMAGE_IO_H_
