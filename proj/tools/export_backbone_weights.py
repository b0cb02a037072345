#!/usr/bin/env python3
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
"""Exports pretrained weights into the miqm weight-manifest format.

Writes the 13 VGG16 conv layers (torchvision, ImageNet), the five LPIPS
linear weights (lpips package, net='vgg') and the DISTS alpha/beta stage
weights into raw little-endian float32 blobs plus a manifest.json.

Conv kernels are transposed from torch's [OC,IC,KH,KW] to [KH,KW,IC,OC].

Usage:
    python3 tools/export_backbone_weights.py <output-dir> [--skip-lpips]
        [--skip-dists] [--dists-weights PATH]

Requires torch + torchvision; lpips for the LPIPS weights; a local copy of
the published DISTS checkpoint (weights.pt) for the DISTS weights.
"""

import argparse
import hashlib
import json
import os
import sys

import numpy as np

CONV_NAMES = [
    "conv1_1", "conv1_2", "conv2_1", "conv2_2", "conv3_1", "conv3_2",
    "conv3_3", "conv4_1", "conv4_2", "conv4_3", "conv5_1", "conv5_2",
    "conv5_3",
]


def write_tensor(out_dir, entries, name, arr):
    arr = np.ascontiguousarray(arr, dtype="<f4")
    fname = name.replace(".", "_").replace("/", "_") + ".bin"
    data = arr.tobytes()
    with open(os.path.join(out_dir, fname), "wb") as f:
        f.write(data)
    entries[name] = {
        "file": fname,
        "byte_length": len(data),
        "sha256": hashlib.sha256(data).hexdigest(),
        "shape": list(arr.shape),
        "dtype": "float32",
    }


def export_vgg(out_dir, entries):
    import torchvision

    model = torchvision.models.vgg16(
        weights=torchvision.models.VGG16_Weights.IMAGENET1K_V1)
    convs = [m for m in model.features if m.__class__.__name__ == "Conv2d"]
    assert len(convs) == len(CONV_NAMES)
    for name, conv in zip(CONV_NAMES, convs):
        w = conv.weight.detach().numpy()  # [OC,IC,KH,KW]
        write_tensor(out_dir, entries, name + ".w", w.transpose(2, 3, 1, 0))
        write_tensor(out_dir, entries, name + ".b", conv.bias.detach().numpy())


def export_lpips(out_dir, entries):
    import lpips

    model = lpips.LPIPS(net="vgg", spatial=False)
    for i, lin in enumerate(model.lins):
        w = lin.model[-1].weight.detach().numpy()  # [1,C,1,1]
        write_tensor(out_dir, entries, "lpips_lin%d.w" % i, w.reshape(-1))


def export_dists(out_dir, entries, ckpt_path):
    import torch

    state = torch.load(ckpt_path, map_location="cpu")
    alpha = state["alpha"].detach().numpy().reshape(-1)
    beta = state["beta"].detach().numpy().reshape(-1)
    write_tensor(out_dir, entries, "dists.alpha", alpha)
    write_tensor(out_dir, entries, "dists.beta", beta)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--skip-lpips", action="store_true")
    ap.add_argument("--skip-dists", action="store_true")
    ap.add_argument("--dists-weights", default="",
                    help="path to the published DISTS checkpoint (weights.pt)")
    args = ap.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    entries = {}
    export_vgg(args.out_dir, entries)
    if not args.skip_lpips:
        export_lpips(args.out_dir, entries)
    if not args.skip_dists:
        if not args.dists_weights:
            print("note: no --dists-weights given, skipping DISTS weights",
                  file=sys.stderr)
        else:
            export_dists(args.out_dir, entries, args.dists_weights)

    manifest = {"format": "miqm-weights-v1", "tensors": entries}
    with open(os.path.join(args.out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print("wrote %d tensors to %s" % (len(entries), args.out_dir))


if __name__ == "__main__":
    main()
