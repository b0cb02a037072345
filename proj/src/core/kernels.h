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

#ifndef MIQM_CORE_KERNELS_H_
#define MIQM_CORE_KERNELS_H_

#include <vector>

#include "core/tensor.h"

namespace miqm {

// Structured compute kernels. The parallel variants are the production
// path (im2col + GEMM for convolution); the serial variants are direct
// reference loops kept for testing and benchmarking. Dispatching by
// compute mode happens in the conv2d/pool/filter entry points.

// 2-D convolution, stride 1, zero padding to preserve the spatial size.
// x: [H,W,IC], w: [KH,KW,IC,OC] (KH, KW odd), bias: [OC] or empty.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias);
Tensor conv2d_serial(const Tensor& x, const Tensor& w, const Tensor& bias);
Tensor conv2d_gemm(const Tensor& x, const Tensor& w, const Tensor& bias);

// Gradient helpers for conv2d.
// Returns w' with w'[ky,kx,oc,ic] = w[KH-1-ky, KW-1-kx, ic, oc]; convolving
// the output gradient with w' yields the input gradient.
Tensor conv2d_flip_transpose_weights(const Tensor& w);
// Accumulates dL/dw into dw (shape of w) and dL/dbias into dbias ([OC],
// ignored when empty) given x and the output gradient dy.
void conv2d_weight_grad(const Tensor& x, const Tensor& dy, Tensor& dw,
                        Tensor& dbias);

// 2x2 max pooling, stride 2, floor halving. Ties resolve to the first
// element in (dy,dx) scan order.
Tensor maxpool2(const Tensor& x);
void maxpool2_backward(const Tensor& x, const Tensor& dy, Tensor& dx);

// 2x2 mean pooling, stride 2, floor halving.
Tensor avgpool2(const Tensor& x);
void avgpool2_backward(const Tensor& dy, Tensor& dx);

// Separable filtering along one axis with replicate (clamp-to-edge)
// borders; the same kernel is applied to every channel.
// axis 0 filters along y, axis 1 along x.
Tensor filter1d(const Tensor& x, const std::vector<Scalar>& kernel, int axis);
void filter1d_backward(const Tensor& dy, const std::vector<Scalar>& kernel,
                       int axis, Tensor& dx);

}  // namespace miqm

#endif  // MIQM_CORE_KERNELS_H_
