# Copyright 2026 The miqm Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Synthetic test images, bit-identical to tests/synth_images.h."""

import numpy as np


def _hash3(x, y, c, salt):
    x = np.uint64(np.uint32(x))
    y = np.uint64(np.uint32(y))
    c = np.uint64(np.uint32(c))
    mask = np.uint64(0xFFFFFFFF)
    h = ((x * np.uint64(73856093)) & mask) ^ ((y * np.uint64(19349663)) & mask)
    h ^= (c * np.uint64(83492791)) & mask
    h ^= (np.uint64(np.uint32(salt)) * np.uint64(2971215073)) & mask
    h &= mask
    h ^= h >> np.uint64(13)
    h = (h * np.uint64(2654435761)) & mask
    h ^= h >> np.uint64(16)
    return h


def noise01(x, y, c, salt):
    return float(_hash3(x, y, c, salt) & np.uint64(0xFFF)) / 4095.0


def synth_reference(h, w):
    img = np.zeros((h, w, 3), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            gx = x / (w - 1) if w > 1 else 0.0
            gy = y / (h - 1) if h > 1 else 0.0
            img[y, x, 0] = 0.15 + 0.7 * gx + 0.08 * (noise01(x, y, 0, 1) - 0.5)
            img[y, x, 1] = 0.15 + 0.7 * gy + 0.08 * (noise01(x, y, 1, 1) - 0.5)
            edge = 0.2 if x < w // 2 else 0.8
            img[y, x, 2] = edge + 0.08 * (noise01(x, y, 2, 1) - 0.5)
    return img


def synth_noisy(ref, amp, salt):
    h, w, _ = ref.shape
    out = ref.copy()
    for y in range(h):
        for x in range(w):
            for c in range(3):
                v = ref[y, x, c] + amp * 2.0 * (noise01(x, y, c, salt) - 0.5)
                out[y, x, c] = min(1.0, max(0.0, v))
    return out


def synth_affine(ref, gain, bias):
    return np.clip(ref * gain + bias, 0.0, 1.0)


def synth_noise_image(h, w, salt):
    img = np.zeros((h, w, 3), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            for c in range(3):
                img[y, x, c] = noise01(x, y, c, salt)
    return img
