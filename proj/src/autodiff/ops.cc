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

#include "autodiff/ops.h"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "core/kernels.h"
#include "core/parallel.h"

namespace miqm {

namespace {

// Floor used when dividing by quantities that can reach zero exactly.
constexpr Scalar kDivFloor = 1e-150;

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

// Builds an elementwise binary op. fwd(a,b) -> out; bwd computes the two
// input gradients for one element given (a, b, out, gout).
template <typename Fwd, typename Bwd>
Var ew_binary(const Var& a, const Var& b, const char* name, Fwd fwd, Bwd bwd) {
  check_same_shape(a.value(), b.value(), name);
  Tensor out(a.value().shape());
  const std::size_t n = out.numel();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  parallel_for(n, [&](std::size_t i) { out[i] = fwd(av[i], bv[i]); });
  return make_op(std::move(out), {a, b}, [bwd](Node& self) {
    Node* pa = self.parents[0].get();
    Node* pb = self.parents[1].get();
    const bool ga = pa->requires_grad;
    const bool gb = pb->requires_grad;
    if (ga) pa->ensure_grad();
    if (gb) pb->ensure_grad();
    const std::size_t n = self.value.numel();
    parallel_for(n, [&](std::size_t i) {
      Scalar da = 0, db = 0;
      bwd(pa->value[i], pb->value[i], self.value[i], self.grad[i], da, db);
      if (ga) pa->grad[i] += da;
      if (gb) pb->grad[i] += db;
    });
  });
}

// Builds an elementwise unary op.
template <typename Fwd, typename Bwd>
Var ew_unary(const Var& a, Fwd fwd, Bwd bwd) {
  Tensor out(a.value().shape());
  const std::size_t n = out.numel();
  const Tensor& av = a.value();
  parallel_for(n, [&](std::size_t i) { out[i] = fwd(av[i]); });
  return make_op(std::move(out), {a}, [bwd](Node& self) {
    Node* pa = self.parents[0].get();
    pa->ensure_grad();
    const std::size_t n = self.value.numel();
    parallel_for(n, [&](std::size_t i) {
      pa->grad[i] += bwd(pa->value[i], self.value[i]) * self.grad[i];
    });
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return ew_binary(
      a, b, "add", [](Scalar x, Scalar y) { return x + y; },
      [](Scalar, Scalar, Scalar, Scalar g, Scalar& da, Scalar& db) {
        da = g;
        db = g;
      });
}

Var sub(const Var& a, const Var& b) {
  return ew_binary(
      a, b, "sub", [](Scalar x, Scalar y) { return x - y; },
      [](Scalar, Scalar, Scalar, Scalar g, Scalar& da, Scalar& db) {
        da = g;
        db = -g;
      });
}

Var mul(const Var& a, const Var& b) {
  return ew_binary(
      a, b, "mul", [](Scalar x, Scalar y) { return x * y; },
      [](Scalar x, Scalar y, Scalar, Scalar g, Scalar& da, Scalar& db) {
        da = g * y;
        db = g * x;
      });
}

Var div(const Var& a, const Var& b) {
  return ew_binary(
      a, b, "div", [](Scalar x, Scalar y) { return x / y; },
      [](Scalar, Scalar y, Scalar out, Scalar g, Scalar& da, Scalar& db) {
        da = g / y;
        db = -g * out / y;
      });
}

Var vmax(const Var& a, const Var& b) {
  return ew_binary(
      a, b, "vmax", [](Scalar x, Scalar y) { return x >= y ? x : y; },
      [](Scalar x, Scalar y, Scalar, Scalar g, Scalar& da, Scalar& db) {
        if (x >= y) {
          da = g;
        } else {
          db = g;
        }
      });
}

Var pow_vv(const Var& x, const Var& p) {
  return ew_binary(
      x, p, "pow_vv", [](Scalar b, Scalar e) { return std::pow(b, e); },
      [](Scalar b, Scalar e, Scalar out, Scalar g, Scalar& db, Scalar& de) {
        const Scalar bf = b > kDivFloor ? b : kDivFloor;
        db = g * e * out / bf;
        // b^e * ln b -> 0 as b -> 0+ for e > 0; use that limit.
        de = b > kDivFloor ? g * out * std::log(b) : 0;
      });
}

Var add_scalar(const Var& a, Scalar s) {
  return ew_unary(
      a, [s](Scalar x) { return x + s; },
      [](Scalar, Scalar) { return Scalar(1); });
}

Var mul_scalar(const Var& a, Scalar s) {
  return ew_unary(
      a, [s](Scalar x) { return x * s; }, [s](Scalar, Scalar) { return s; });
}

Var pow_scalar(const Var& x, Scalar p) {
  return ew_unary(
      x, [p](Scalar v) { return std::pow(v, p); },
      [p](Scalar v, Scalar out) {
        const Scalar vf = v > kDivFloor ? v : kDivFloor;
        return p * out / vf;
      });
}

Var neg(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return -x; },
      [](Scalar, Scalar) { return Scalar(-1); });
}

Var vabs(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return std::abs(x); },
      [](Scalar x, Scalar) {
        return x > 0 ? Scalar(1) : (x < 0 ? Scalar(-1) : Scalar(0));
      });
}

Var square(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return x * x; },
      [](Scalar x, Scalar) { return 2 * x; });
}

Var vsqrt(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return std::sqrt(x); },
      [](Scalar, Scalar out) {
        const Scalar of = out > kDivFloor ? out : kDivFloor;
        return Scalar(0.5) / of;
      });
}

Var vexp(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return std::exp(x); },
      [](Scalar, Scalar out) { return out; });
}

Var vlog(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return std::log(x); },
      [](Scalar x, Scalar) {
        const Scalar xf = x > kDivFloor ? x : kDivFloor;
        return Scalar(1) / xf;
      });
}

Var sigmoid(const Var& a) {
  return ew_unary(
      a,
      [](Scalar x) {
        // Split by sign for numerical stability at large |x|.
        if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
        const Scalar e = std::exp(x);
        return e / (Scalar(1) + e);
      },
      [](Scalar, Scalar out) { return out * (Scalar(1) - out); });
}

Var relu(const Var& a) {
  return ew_unary(
      a, [](Scalar x) { return x > 0 ? x : Scalar(0); },
      [](Scalar x, Scalar) { return x > 0 ? Scalar(1) : Scalar(0); });
}

Var clamp01(const Var& a) {
  return ew_unary(
      a,
      [](Scalar x) { return x < 0 ? Scalar(0) : (x > 1 ? Scalar(1) : x); },
      [](Scalar x, Scalar) {
        return (x >= 0 && x <= 1) ? Scalar(1) : Scalar(0);
      });
}

Var srgb_to_linear(const Var& a) {
  return ew_unary(
      a,
      [](Scalar u) {
        if (u <= Scalar(0.04045)) return u / Scalar(12.92);
        return std::pow((u + Scalar(0.055)) / Scalar(1.055), Scalar(2.4));
      },
      [](Scalar u, Scalar) {
        if (u <= Scalar(0.04045)) return Scalar(1) / Scalar(12.92);
        return Scalar(2.4) / Scalar(1.055) *
               std::pow((u + Scalar(0.055)) / Scalar(1.055), Scalar(1.4));
      });
}

Var cielab_f(const Var& a) {
  constexpr Scalar kDelta = Scalar(6) / Scalar(29);
  constexpr Scalar kDelta3 = kDelta * kDelta * kDelta;
  constexpr Scalar kSlope = Scalar(1) / (3 * kDelta * kDelta);
  return ew_unary(
      a,
      [](Scalar t) {
        if (t > kDelta3) return std::cbrt(t);
        return kSlope * t + Scalar(4) / Scalar(29);
      },
      [](Scalar t, Scalar out) {
        if (t > kDelta3) return Scalar(1) / (3 * out * out);
        return kSlope;
      });
}

Var concat_c(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.shape().size() != 3 || bv.shape().size() != 3 || av.h() != bv.h() ||
      av.w() != bv.w()) {
    throw std::invalid_argument("concat_c: incompatible shapes " +
                                av.shape_str() + " vs " + bv.shape_str());
  }
  const int h = av.h(), w = av.w(), ca = av.c(), cb = bv.c();
  Tensor out = Tensor::hwc(h, w, ca + cb);
  parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
    const int y = static_cast<int>(p) / w;
    const int x = static_cast<int>(p) % w;
    for (int ch = 0; ch < ca; ++ch) out.at(y, x, ch) = av.at(y, x, ch);
    for (int ch = 0; ch < cb; ++ch) out.at(y, x, ca + ch) = bv.at(y, x, ch);
  });
  return make_op(std::move(out), {a, b}, [ca, cb](Node& self) {
    Node* pa = self.parents[0].get();
    Node* pb = self.parents[1].get();
    const bool ga = pa->requires_grad;
    const bool gb = pb->requires_grad;
    if (ga) pa->ensure_grad();
    if (gb) pb->ensure_grad();
    const int h = self.value.h(), w = self.value.w();
    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
      const int y = static_cast<int>(p) / w;
      const int x = static_cast<int>(p) % w;
      if (ga) {
        for (int ch = 0; ch < ca; ++ch)
          pa->grad.at(y, x, ch) += self.grad.at(y, x, ch);
      }
      if (gb) {
        for (int ch = 0; ch < cb; ++ch)
          pb->grad.at(y, x, ch) += self.grad.at(y, x, ca + ch);
      }
    });
  });
}

Var slice_c(const Var& x, int c0, int c1) {
  const Tensor& xv = x.value();
  if (xv.shape().size() != 3 || c0 < 0 || c1 > xv.c() || c0 >= c1) {
    throw std::invalid_argument("slice_c: bad channel range");
  }
  const int h = xv.h(), w = xv.w(), cn = c1 - c0;
  Tensor out = Tensor::hwc(h, w, cn);
  parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
    const int y = static_cast<int>(p) / w;
    const int xx = static_cast<int>(p) % w;
    for (int ch = 0; ch < cn; ++ch) out.at(y, xx, ch) = xv.at(y, xx, c0 + ch);
  });
  return make_op(std::move(out), {x}, [c0, cn](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const int h = self.value.h(), w = self.value.w();
    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
      const int y = static_cast<int>(p) / w;
      const int xx = static_cast<int>(p) % w;
      for (int ch = 0; ch < cn; ++ch)
        px->grad.at(y, xx, c0 + ch) += self.grad.at(y, xx, ch);
    });
  });
}

Var color_matrix(const Var& x, const Tensor& m) {
  const Tensor& xv = x.value();
  if (xv.shape().size() != 3 || m.shape().size() != 2 ||
      m.shape()[0] != xv.c()) {
    throw std::invalid_argument("color_matrix: incompatible shapes");
  }
  const int h = xv.h(), w = xv.w(), ci = xv.c(), co = m.shape()[1];
  Tensor out = Tensor::hwc(h, w, co);
  parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
    const int y = static_cast<int>(p) / w;
    const int xx = static_cast<int>(p) % w;
    for (int oc = 0; oc < co; ++oc) {
      Scalar acc = 0;
      for (int ic = 0; ic < ci; ++ic)
        acc += xv.at(y, xx, ic) * m[static_cast<std::size_t>(ic) * co + oc];
      out.at(y, xx, oc) = acc;
    }
  });
  return make_op(std::move(out), {x}, [m, ci, co](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const int h = self.value.h(), w = self.value.w();
    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
      const int y = static_cast<int>(p) / w;
      const int xx = static_cast<int>(p) % w;
      for (int ic = 0; ic < ci; ++ic) {
        Scalar acc = 0;
        for (int oc = 0; oc < co; ++oc)
          acc += self.grad.at(y, xx, oc) *
                 m[static_cast<std::size_t>(ic) * co + oc];
        px->grad.at(y, xx, ic) += acc;
      }
    });
  });
}

Var channel_affine(const Var& x, const Tensor& scale, const Tensor& shift) {
  const Tensor& xv = x.value();
  const int c = xv.c();
  if (static_cast<int>(scale.numel()) != c ||
      static_cast<int>(shift.numel()) != c) {
    throw std::invalid_argument("channel_affine: constant size mismatch");
  }
  Tensor out(xv.shape());
  const std::size_t n = xv.numel();
  parallel_for(n, [&](std::size_t i) {
    const int ch = static_cast<int>(i % c);
    out[i] = xv[i] * scale[ch] + shift[ch];
  });
  return make_op(std::move(out), {x}, [scale, c](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const std::size_t n = self.value.numel();
    parallel_for(n, [&](std::size_t i) {
      px->grad[i] += self.grad[i] * scale[static_cast<int>(i % c)];
    });
  });
}

Var mul_mask(const Var& x, const Var& mask) {
  const Tensor& xv = x.value();
  const Tensor& mv = mask.value();
  if (xv.shape().size() != 3 || mv.shape().size() != 3 || mv.c() != 1 ||
      mv.h() != xv.h() || mv.w() != xv.w()) {
    throw std::invalid_argument("mul_mask: mask must be [H,W,1] matching x");
  }
  const int h = xv.h(), w = xv.w(), c = xv.c();
  Tensor out(xv.shape());
  parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
    const int y = static_cast<int>(p) / w;
    const int xx = static_cast<int>(p) % w;
    const Scalar m = mv.at(y, xx, 0);
    for (int ch = 0; ch < c; ++ch) out.at(y, xx, ch) = xv.at(y, xx, ch) * m;
  });
  return make_op(std::move(out), {x, mask}, [c](Node& self) {
    Node* px = self.parents[0].get();
    Node* pm = self.parents[1].get();
    const bool gx = px->requires_grad;
    const bool gm = pm->requires_grad;
    if (gx) px->ensure_grad();
    if (gm) pm->ensure_grad();
    const int h = self.value.h(), w = self.value.w();
    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
      const int y = static_cast<int>(p) / w;
      const int xx = static_cast<int>(p) % w;
      const Scalar m = pm->value.at(y, xx, 0);
      Scalar macc = 0;
      for (int ch = 0; ch < c; ++ch) {
        const Scalar g = self.grad.at(y, xx, ch);
        if (gx) px->grad.at(y, xx, ch) += g * m;
        macc += g * px->value.at(y, xx, ch);
      }
      if (gm) pm->grad.at(y, xx, 0) += macc;
    });
  });
}

Var channel_l2norm(const Var& x) {
  const Tensor& xv = x.value();
  if (xv.shape().size() != 3) {
    throw std::invalid_argument("channel_l2norm: rank-3 input expected");
  }
  const int h = xv.h(), w = xv.w(), c = xv.c();
  Tensor out = Tensor::hwc(h, w, 1);
  parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
    const int y = static_cast<int>(p) / w;
    const int xx = static_cast<int>(p) % w;
    Scalar acc = 0;
    for (int ch = 0; ch < c; ++ch) {
      const Scalar v = xv.at(y, xx, ch);
      acc += v * v;
    }
    out.at(y, xx, 0) = std::sqrt(acc);
  });
  return make_op(std::move(out), {x}, [c](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const int h = self.value.h(), w = self.value.w();
    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t p) {
      const int y = static_cast<int>(p) / w;
      const int xx = static_cast<int>(p) % w;
      const Scalar norm = self.value.at(y, xx, 0);
      const Scalar nf = norm > kDivFloor ? norm : kDivFloor;
      const Scalar g = self.grad.at(y, xx, 0) / nf;
      for (int ch = 0; ch < c; ++ch)
        px->grad.at(y, xx, ch) += g * px->value.at(y, xx, ch);
    });
  });
}

Var sum_all(const Var& x) {
  Tensor out({1});
  out[0] = block_sum(x.value().data(), x.value().numel());
  return make_op(std::move(out), {x}, [](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const Scalar g = self.grad[0];
    const std::size_t n = px->value.numel();
    parallel_for(n, [&](std::size_t i) { px->grad[i] += g; });
  });
}

Var mean_all(const Var& x) {
  const std::size_t n = static_cast<std::size_t>(x.value().numel());
  Tensor out({1});
  out[0] = block_sum(x.value().data(), n) / static_cast<Scalar>(n);
  return make_op(std::move(out), {x}, [n](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const Scalar g = self.grad[0] / static_cast<Scalar>(n);
    parallel_for(n, [&](std::size_t i) { px->grad[i] += g; });
  });
}

Var channel_mean(const Var& x) {
  const Tensor& xv = x.value();
  if (xv.shape().size() != 3) {
    throw std::invalid_argument("channel_mean: rank-3 input expected");
  }
  const int h = xv.h(), w = xv.w(), c = xv.c();
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  Tensor out({c});
  // Deterministic reduction: fixed row blocks, serial combine per channel.
  for (int ch = 0; ch < c; ++ch) {
    std::vector<Scalar> rows(h, 0);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t y) {
      Scalar acc = 0;
      for (int xx = 0; xx < w; ++xx)
        acc += xv.at(static_cast<int>(y), xx, ch);
      rows[y] = acc;
    });
    Scalar total = 0;
    for (int y = 0; y < h; ++y) total += rows[y];
    out[ch] = total / static_cast<Scalar>(pixels);
  }
  return make_op(std::move(out), {x}, [pixels, c](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    const std::size_t n = px->value.numel();
    parallel_for(n, [&](std::size_t i) {
      px->grad[i] += self.grad[static_cast<int>(i % c)] /
                     static_cast<Scalar>(pixels);
    });
  });
}

Var conv2d_op(const Var& x, const Var& w, const Var& b) {
  Tensor out = conv2d(x.value(), w.value(), b.value());
  return make_op(std::move(out), {x, w, b}, [](Node& self) {
    Node* px = self.parents[0].get();
    Node* pw = self.parents[1].get();
    Node* pb = self.parents[2].get();
    if (px->requires_grad) {
      px->ensure_grad();
      Tensor wt = conv2d_flip_transpose_weights(pw->value);
      Tensor zero_bias = Tensor::full({px->value.c()}, 0);
      Tensor dx = conv2d(self.grad, wt, zero_bias);
      const std::size_t n = dx.numel();
      parallel_for(n, [&](std::size_t i) { px->grad[i] += dx[i]; });
    }
    if (pw->requires_grad || pb->requires_grad) {
      pw->ensure_grad();
      pb->ensure_grad();
      conv2d_weight_grad(px->value, self.grad, pw->grad, pb->grad);
    }
  });
}

Var maxpool2_op(const Var& x) {
  Tensor out = maxpool2(x.value());
  return make_op(std::move(out), {x}, [](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    maxpool2_backward(px->value, self.grad, px->grad);
  });
}

Var avgpool2_op(const Var& x) {
  Tensor out = avgpool2(x.value());
  return make_op(std::move(out), {x}, [](Node& self) {
    Node* px = self.parents[0].get();
    px->ensure_grad();
    avgpool2_backward(self.grad, px->grad);
  });
}

Var filter1d_op(const Var& x, std::vector<Scalar> kernel, int axis) {
  Tensor out = filter1d(x.value(), kernel, axis);
  return make_op(std::move(out), {x},
                 [kernel = std::move(kernel), axis](Node& self) {
                   Node* px = self.parents[0].get();
                   px->ensure_grad();
                   filter1d_backward(self.grad, kernel, axis, px->grad);
                 });
}

Var dense(const Var& x, const Var& w, const Var& b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (wv.shape().size() != 2 ||
      static_cast<std::int64_t>(wv.shape()[0]) != xv.numel() ||
      static_cast<std::int64_t>(wv.shape()[1]) != bv.numel()) {
    throw std::invalid_argument("dense: incompatible shapes");
  }
  const int n = wv.shape()[0], m = wv.shape()[1];
  Tensor out({m});
  for (int j = 0; j < m; ++j) {
    Scalar acc = bv[j];
    for (int i = 0; i < n; ++i)
      acc += xv[i] * wv[static_cast<std::size_t>(i) * m + j];
    out[j] = acc;
  }
  return make_op(std::move(out), {x, w, b}, [n, m](Node& self) {
    Node* px = self.parents[0].get();
    Node* pw = self.parents[1].get();
    Node* pb = self.parents[2].get();
    if (px->requires_grad) {
      px->ensure_grad();
      for (int i = 0; i < n; ++i) {
        Scalar acc = 0;
        for (int j = 0; j < m; ++j)
          acc += pw->value[static_cast<std::size_t>(i) * m + j] * self.grad[j];
        px->grad[i] += acc;
      }
    }
    if (pw->requires_grad) {
      pw->ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
          pw->grad[static_cast<std::size_t>(i) * m + j] +=
              px->value[i] * self.grad[j];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (int j = 0; j < m; ++j) pb->grad[j] += self.grad[j];
    }
  });
}

Var scalar_const(Scalar v) { return Var::constant(Tensor::full({1}, v)); }

}  // namespace miqm
