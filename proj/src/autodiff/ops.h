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

#ifndef MIQM_AUTODIFF_OPS_H_
#define MIQM_AUTODIFF_OPS_H_

#include <vector>

#include "autodiff/graph.h"

namespace miqm {

// Elementwise binary ops over equal shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var vmax(const Var& a, const Var& b);  // ties route the gradient to a
Var pow_vv(const Var& x, const Var& p);  // x^p, x >= 0

// Scalar broadcast ops.
Var add_scalar(const Var& a, Scalar s);
Var mul_scalar(const Var& a, Scalar s);
Var pow_scalar(const Var& x, Scalar p);  // x >= 0 when p is fractional

// Elementwise unary ops.
Var neg(const Var& a);
Var vabs(const Var& a);     // subgradient 0 at 0
Var square(const Var& a);
Var vsqrt(const Var& a);
Var vexp(const Var& a);
Var vlog(const Var& a);
Var sigmoid(const Var& a);
Var relu(const Var& a);
Var clamp01(const Var& a);
Var srgb_to_linear(const Var& a);  // sRGB electro-optical transfer
Var cielab_f(const Var& a);        // CIELAB cube-root nonlinearity

// Structural ops (rank-3 [H,W,C] unless noted).
Var concat_c(const Var& a, const Var& b);
Var slice_c(const Var& x, int c0, int c1);  // channels [c0, c1)
// out[...,co] = sum_ci x[...,ci] * m(ci,co); m is a constant [Cin,Cout].
Var color_matrix(const Var& x, const Tensor& m);
// out[...,c] = x[...,c] * scale[c] + shift[c]; constants.
Var channel_affine(const Var& x, const Tensor& scale, const Tensor& shift);
// x: [H,W,C], mask: [H,W,1]; mask broadcast over channels.
Var mul_mask(const Var& x, const Var& mask);
// Per-pixel L2 norm over channels -> [H,W,1].
Var channel_l2norm(const Var& x);

// Reductions.
Var mean_all(const Var& x);     // -> [1]
Var sum_all(const Var& x);      // -> [1]
Var channel_mean(const Var& x);  // [H,W,C] -> [C]

// Neural / spatial ops.
Var conv2d_op(const Var& x, const Var& w, const Var& b);  // zero-pad same
Var maxpool2_op(const Var& x);
Var avgpool2_op(const Var& x);
// Replicate-border separable filtering; the kernel is a constant.
Var filter1d_op(const Var& x, std::vector<Scalar> kernel, int axis);
// x: [N], w: [N,M], b: [M] -> [M].
Var dense(const Var& x, const Var& w, const Var& b);

Var scalar_const(Scalar v);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }

}  // namespace miqm

#endif  // MIQM_AUTODIFF_OPS_H_
