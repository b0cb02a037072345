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

#include "core/kernels.h"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "core/parallel.h"

namespace miqm {

namespace {

using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// Fixed row-band height for the GEMM path; bands are the unit of
// parallelism, so results do not depend on the thread count.
constexpr int kBandRows = 4;

void check_conv_args(const Tensor& x, const Tensor& w, const Tensor& bias) {
  if (x.rank() != 3 || w.rank() != 4) {
    throw std::invalid_argument("conv2d: x must be rank 3, w rank 4");
  }
  if (w.dim(2) != x.c()) {
    throw std::invalid_argument("conv2d: channel mismatch, x has " +
                                std::to_string(x.c()) + ", w expects " +
                                std::to_string(w.dim(2)));
  }
  if (w.dim(0) % 2 == 0 || w.dim(1) % 2 == 0) {
    throw std::invalid_argument("conv2d: kernel dims must be odd");
  }
  if (!bias.empty() && bias.numel() != w.dim(3)) {
    throw std::invalid_argument("conv2d: bias size mismatch");
  }
}

// Fills a column slab for rows [y0, y1): one row per pixel, KH*KW*IC wide.
void fill_col_band(const Tensor& x, int kh, int kw, int y0, int y1,
                   Scalar* col) {
  const int h = x.h(), w = x.w(), ic = x.c();
  const int ph = kh / 2, pw = kw / 2;
  const size_t kk = static_cast<size_t>(kh) * kw * ic;
  for (int y = y0; y < y1; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      Scalar* row = col + (static_cast<size_t>(y - y0) * w + xx) * kk;
      size_t idx = 0;
      for (int ky = 0; ky < kh; ++ky) {
        const int yy = y + ky - ph;
        for (int kx = 0; kx < kw; ++kx) {
          const int xs = xx + kx - pw;
          if (yy < 0 || yy >= h || xs < 0 || xs >= w) {
            for (int c = 0; c < ic; ++c) row[idx++] = 0;
          } else {
            const Scalar* src = &x.at(yy, xs, 0);
            for (int c = 0; c < ic; ++c) row[idx++] = src[c];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d_serial(const Tensor& x, const Tensor& w, const Tensor& bias) {
  check_conv_args(x, w, bias);
  const int h = x.h(), wid = x.w(), ic = x.c();
  const int kh = w.dim(0), kw = w.dim(1), oc = w.dim(3);
  const int ph = kh / 2, pw = kw / 2;
  Tensor out = Tensor::hwc(h, wid, oc);
  std::vector<Scalar> acc(static_cast<size_t>(oc));
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < wid; ++xx) {
      if (bias.empty()) {
        std::fill(acc.begin(), acc.end(), Scalar(0));
      } else {
        std::copy(bias.data(), bias.data() + oc, acc.begin());
      }
      for (int ky = 0; ky < kh; ++ky) {
        const int yy = y + ky - ph;
        if (yy < 0 || yy >= h) continue;
        for (int kx = 0; kx < kw; ++kx) {
          const int xs = xx + kx - pw;
          if (xs < 0 || xs >= wid) continue;
          const Scalar* src = &x.at(yy, xs, 0);
          const Scalar* wk = w.data() + (static_cast<size_t>(ky) * kw + kx) * ic * oc;
          for (int c = 0; c < ic; ++c) {
            const Scalar v = src[c];
            const Scalar* wrow = wk + static_cast<size_t>(c) * oc;
            for (int o = 0; o < oc; ++o) acc[static_cast<size_t>(o)] += v * wrow[o];
          }
        }
      }
      std::copy(acc.begin(), acc.end(), &out.at(y, xx, 0));
    }
  }
  return out;
}

Tensor conv2d_gemm(const Tensor& x, const Tensor& w, const Tensor& bias) {
  check_conv_args(x, w, bias);
  const int h = x.h(), wid = x.w(), ic = x.c();
  const int kh = w.dim(0), kw = w.dim(1), oc = w.dim(3);
  const std::int64_t kk = static_cast<std::int64_t>(kh) * kw * ic;
  Tensor out = Tensor::hwc(h, wid, oc);
  const int nbands = (h + kBandRows - 1) / kBandRows;
  ConstMapMat wmat(w.data(), kk, oc);
  parallel_for(nbands, [&](std::int64_t b) {
    const int y0 = static_cast<int>(b) * kBandRows;
    const int y1 = std::min(y0 + kBandRows, h);
    const std::int64_t pixels = static_cast<std::int64_t>(y1 - y0) * wid;
    thread_local std::vector<Scalar> col;
    col.resize(static_cast<size_t>(pixels * kk));
    fill_col_band(x, kh, kw, y0, y1, col.data());
    ConstMapMat colmat(col.data(), pixels, kk);
    MapMat outmat(&out.at(y0, 0, 0), pixels, oc);
    outmat.noalias() = colmat * wmat;
    if (!bias.empty()) {
      for (std::int64_t p = 0; p < pixels; ++p) {
        Scalar* row = &out.at(y0, 0, 0) + p * oc;
        for (int o = 0; o < oc; ++o) row[o] += bias[o];
      }
    }
  });
  return out;
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias) {
  return parallel_enabled() ? conv2d_gemm(x, w, bias) : conv2d_serial(x, w, bias);
}

Tensor conv2d_flip_transpose_weights(const Tensor& w) {
  const int kh = w.dim(0), kw = w.dim(1), ic = w.dim(2), oc = w.dim(3);
  Tensor wt({kh, kw, oc, ic});
  for (int ky = 0; ky < kh; ++ky) {
    for (int kx = 0; kx < kw; ++kx) {
      for (int c = 0; c < ic; ++c) {
        for (int o = 0; o < oc; ++o) {
          wt[((static_cast<std::int64_t>(ky) * kw + kx) * oc + o) * ic + c] =
              w[((static_cast<std::int64_t>(kh - 1 - ky) * kw + (kw - 1 - kx)) * ic + c) * oc + o];
        }
      }
    }
  }
  return wt;
}

void conv2d_weight_grad(const Tensor& x, const Tensor& dy, Tensor& dw,
                        Tensor& dbias) {
  const int h = x.h(), wid = x.w(), ic = x.c();
  const int kh = dw.dim(0), kw = dw.dim(1), oc = dw.dim(3);
  const std::int64_t kk = static_cast<std::int64_t>(kh) * kw * ic;
  MapMat dwmat(dw.data(), kk, oc);
  // Bands accumulate in fixed serial order so the result is independent of
  // the thread count; the col build inside each band runs in parallel.
  std::vector<Scalar> col;
  const int nbands = (h + kBandRows - 1) / kBandRows;
  for (int b = 0; b < nbands; ++b) {
    const int y0 = b * kBandRows;
    const int y1 = std::min(y0 + kBandRows, h);
    const std::int64_t pixels = static_cast<std::int64_t>(y1 - y0) * wid;
    col.resize(static_cast<size_t>(pixels * kk));
    const int rows = y1 - y0;
    parallel_for(rows, [&](std::int64_t r) {
      fill_col_band(x, kh, kw, y0 + static_cast<int>(r), y0 + static_cast<int>(r) + 1,
                    col.data() + static_cast<size_t>(r) * wid * kk);
    });
    ConstMapMat colmat(col.data(), pixels, kk);
    ConstMapMat dymat(&dy.at(y0, 0, 0), pixels, oc);
    dwmat.noalias() += colmat.transpose() * dymat;
  }
  if (!dbias.empty()) {
    const std::int64_t pixels = static_cast<std::int64_t>(h) * wid;
    parallel_for(oc, [&](std::int64_t o) {
      Scalar s = 0;
      for (std::int64_t p = 0; p < pixels; ++p) s += dy[p * oc + o];
      dbias[o] += s;
    });
  }
}

Tensor maxpool2(const Tensor& x) {
  const int oh = x.h() / 2, ow = x.w() / 2, c = x.c();
  Tensor out = Tensor::hwc(oh, ow, c);
  parallel_for(oh, [&](std::int64_t y) {
    for (int xx = 0; xx < ow; ++xx) {
      for (int ch = 0; ch < c; ++ch) {
        Scalar m = x.at(2 * static_cast<int>(y), 2 * xx, ch);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const Scalar v = x.at(2 * static_cast<int>(y) + dy, 2 * xx + dx, ch);
            if (v > m) m = v;
          }
        }
        out.at(static_cast<int>(y), xx, ch) = m;
      }
    }
  });
  return out;
}

void maxpool2_backward(const Tensor& x, const Tensor& dy, Tensor& dx) {
  const int oh = dy.h(), ow = dy.w(), c = dy.c();
  parallel_for(oh, [&](std::int64_t y) {
    for (int xx = 0; xx < ow; ++xx) {
      for (int ch = 0; ch < c; ++ch) {
        int by = 0, bx = 0;
        Scalar m = x.at(2 * static_cast<int>(y), 2 * xx, ch);
        for (int dyi = 0; dyi < 2; ++dyi) {
          for (int dxi = 0; dxi < 2; ++dxi) {
            const Scalar v = x.at(2 * static_cast<int>(y) + dyi, 2 * xx + dxi, ch);
            if (v > m) {
              m = v;
              by = dyi;
              bx = dxi;
            }
          }
        }
        dx.at(2 * static_cast<int>(y) + by, 2 * xx + bx, ch) +=
            dy.at(static_cast<int>(y), xx, ch);
      }
    }
  });
}

Tensor avgpool2(const Tensor& x) {
  const int oh = x.h() / 2, ow = x.w() / 2, c = x.c();
  Tensor out = Tensor::hwc(oh, ow, c);
  parallel_for(oh, [&](std::int64_t y) {
    for (int xx = 0; xx < ow; ++xx) {
      for (int ch = 0; ch < c; ++ch) {
        Scalar s = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            s += x.at(2 * static_cast<int>(y) + dy, 2 * xx + dx, ch);
          }
        }
        out.at(static_cast<int>(y), xx, ch) = s * Scalar(0.25);
      }
    }
  });
  return out;
}

void avgpool2_backward(const Tensor& dy, Tensor& dx) {
  const int oh = dy.h(), ow = dy.w(), c = dy.c();
  parallel_for(oh, [&](std::int64_t y) {
    for (int xx = 0; xx < ow; ++xx) {
      for (int ch = 0; ch < c; ++ch) {
        const Scalar g = dy.at(static_cast<int>(y), xx, ch) * Scalar(0.25);
        for (int dyi = 0; dyi < 2; ++dyi) {
          for (int dxi = 0; dxi < 2; ++dxi) {
            dx.at(2 * static_cast<int>(y) + dyi, 2 * xx + dxi, ch) += g;
          }
        }
      }
    }
  });
}

Tensor filter1d(const Tensor& x, const std::vector<Scalar>& kernel, int axis) {
  const int h = x.h(), w = x.w(), c = x.c();
  const int r = static_cast<int>(kernel.size()) / 2;
  Tensor out = Tensor::hwc(h, w, c);
  if (axis == 1) {
    parallel_for(h, [&](std::int64_t y) {
      for (int xx = 0; xx < w; ++xx) {
        for (int ch = 0; ch < c; ++ch) {
          Scalar s = 0;
          for (int i = -r; i <= r; ++i) {
            const int xs = std::clamp(xx + i, 0, w - 1);
            s += kernel[static_cast<size_t>(i + r)] * x.at(static_cast<int>(y), xs, ch);
          }
          out.at(static_cast<int>(y), xx, ch) = s;
        }
      }
    });
  } else {
    parallel_for(h, [&](std::int64_t y) {
      for (int xx = 0; xx < w; ++xx) {
        for (int ch = 0; ch < c; ++ch) {
          Scalar s = 0;
          for (int i = -r; i <= r; ++i) {
            const int ys = std::clamp(static_cast<int>(y) + i, 0, h - 1);
            s += kernel[static_cast<size_t>(i + r)] * x.at(ys, xx, ch);
          }
          out.at(static_cast<int>(y), xx, ch) = s;
        }
      }
    });
  }
  return out;
}

void filter1d_backward(const Tensor& dy, const std::vector<Scalar>& kernel,
                       int axis, Tensor& dx) {
  const int h = dy.h(), w = dy.w(), c = dy.c();
  const int r = static_cast<int>(kernel.size()) / 2;
  if (axis == 1) {
    // Scatter stays within one row; rows run in parallel.
    parallel_for(h, [&](std::int64_t y) {
      for (int xx = 0; xx < w; ++xx) {
        for (int ch = 0; ch < c; ++ch) {
          const Scalar g = dy.at(static_cast<int>(y), xx, ch);
          for (int i = -r; i <= r; ++i) {
            const int xs = std::clamp(xx + i, 0, w - 1);
            dx.at(static_cast<int>(y), xs, ch) += kernel[static_cast<size_t>(i + r)] * g;
          }
        }
      }
    });
  } else {
    // Scatter stays within one column; columns run in parallel.
    parallel_for(w, [&](std::int64_t xx) {
      for (int y = 0; y < h; ++y) {
        for (int ch = 0; ch < c; ++ch) {
          const Scalar g = dy.at(y, static_cast<int>(xx), ch);
          for (int i = -r; i <= r; ++i) {
            const int ys = std::clamp(y + i, 0, h - 1);
            dx.at(ys, static_cast<int>(xx), ch) += kernel[static_cast<size_t>(i + r)] * g;
          }
        }
      }
    });
  }
}

}  // namespace miqm
