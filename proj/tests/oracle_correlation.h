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
//
// Brute-force reference implementations of the correlation statistics,
// written independently of src/eval: quadratic pair counting instead of
// sort-based ranking, and Nelder-Mead instead of Levenberg-Marquardt for
// the logistic fit. Tests compare the production code against these.

#ifndef MIQM_TESTS_ORACLE_CORRELATION_H_
#define MIQM_TESTS_ORACLE_CORRELATION_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "core/rng.h"
#include "core/tensor.h"

namespace miqm_test {

using miqm::Scalar;

// rank = (#smaller) + (#equal + 1) / 2, counted pairwise.
inline std::vector<Scalar> brute_ranks(const std::vector<Scalar>& v) {
  const std::size_t n = v.size();
  std::vector<Scalar> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    int less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    r[i] = Scalar(less) + Scalar(equal + 1) / 2.0;
  }
  return r;
}

inline Scalar brute_pearson(const std::vector<Scalar>& x,
                            const std::vector<Scalar>& y) {
  const std::size_t n = x.size();
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i] / Scalar(n);
  for (std::size_t i = 0; i < n; ++i) my += y[i] / Scalar(n);
  Scalar xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xx += (x[i] - mx) * (x[i] - mx);
    yy += (y[i] - my) * (y[i] - my);
    xy += (x[i] - mx) * (y[i] - my);
  }
  if (xx == 0 || yy == 0) return 0;
  return xy / std::sqrt(xx * yy);
}

inline Scalar brute_srcc(const std::vector<Scalar>& x,
                         const std::vector<Scalar>& y) {
  return brute_pearson(brute_ranks(x), brute_ranks(y));
}

// tau-b from explicit concordant/discordant/tied pair enumeration.
inline Scalar brute_krcc(const std::vector<Scalar>& x,
                         const std::vector<Scalar>& y) {
  const std::size_t n = x.size();
  long long con = 0, dis = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Scalar dxv = x[i] - x[j];
      const Scalar dyv = y[i] - y[j];
      if (dxv == 0 && dyv == 0) continue;
      if (dxv == 0) {
        ++tx;
      } else if (dyv == 0) {
        ++ty;
      } else if (dxv * dyv > 0) {
        ++con;
      } else {
        ++dis;
      }
    }
  }
  const Scalar den = std::sqrt(Scalar(con + dis + tx)) *
                     std::sqrt(Scalar(con + dis + ty));
  if (den == 0) return 0;
  return Scalar(con - dis) / den;
}

inline Scalar oracle_logistic(const std::array<Scalar, 4>& p, Scalar x) {
  const Scalar ad = std::max(std::abs(p[3]), Scalar(1e-12));
  const Scalar z = (x - p[2]) / ad;
  Scalar s;
  if (z >= 0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const Scalar e = std::exp(z);
    s = e / (1.0 + e);
  }
  return (p[0] - p[1]) * s + p[1];
}

inline Scalar oracle_fit_sse(const std::array<Scalar, 4>& p,
                             const std::vector<Scalar>& x,
                             const std::vector<Scalar>& y) {
  Scalar sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar r = oracle_logistic(p, x[i]) - y[i];
    sse += r * r;
  }
  return sse;
}

// Textbook Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5) on the four logistic parameters.
inline std::array<Scalar, 4> nelder_mead_fit(const std::array<Scalar, 4>& init,
                                             const std::array<Scalar, 4>& step,
                                             const std::vector<Scalar>& x,
                                             const std::vector<Scalar>& y,
                                             Scalar* sse_out) {
  using Point = std::array<Scalar, 4>;
  struct Vertex {
    Point p;
    Scalar f;
  };
  std::vector<Vertex> s;
  s.push_back({init, oracle_fit_sse(init, x, y)});
  for (int k = 0; k < 4; ++k) {
    Point p = init;
    p[k] += step[k];
    s.push_back({p, oracle_fit_sse(p, x, y)});
  }
  const auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  for (int iter = 0; iter < 4000; ++iter) {
    std::sort(s.begin(), s.end(), by_f);
    if (s[4].f - s[0].f <= 1e-16 * (std::abs(s[0].f) + 1e-16)) break;
    Point centroid{0, 0, 0, 0};
    for (int v = 0; v < 4; ++v) {
      for (int k = 0; k < 4; ++k) centroid[k] += s[v].p[k] / 4.0;
    }
    Point refl;
    for (int k = 0; k < 4; ++k) refl[k] = centroid[k] + (centroid[k] - s[4].p[k]);
    const Scalar fr = oracle_fit_sse(refl, x, y);
    if (fr < s[0].f) {
      Point exp_p;
      for (int k = 0; k < 4; ++k) {
        exp_p[k] = centroid[k] + 2.0 * (centroid[k] - s[4].p[k]);
      }
      const Scalar fe = oracle_fit_sse(exp_p, x, y);
      s[4] = fe < fr ? Vertex{exp_p, fe} : Vertex{refl, fr};
    } else if (fr < s[3].f) {
      s[4] = {refl, fr};
    } else {
      Point con;
      for (int k = 0; k < 4; ++k) {
        con[k] = centroid[k] + 0.5 * (s[4].p[k] - centroid[k]);
      }
      const Scalar fc = oracle_fit_sse(con, x, y);
      if (fc < s[4].f) {
        s[4] = {con, fc};
      } else {
        for (int v = 1; v < 5; ++v) {
          for (int k = 0; k < 4; ++k) {
            s[v].p[k] = s[0].p[k] + 0.5 * (s[v].p[k] - s[0].p[k]);
          }
          s[v].f = oracle_fit_sse(s[v].p, x, y);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_f);
  if (sse_out != nullptr) *sse_out = s[0].f;
  return s[0].p;
}

// For fixed (c, d) the model is linear in (a, b); solve that 2x2
// least-squares slice exactly.
inline Scalar oracle_profile_ab(const std::vector<Scalar>& x,
                                const std::vector<Scalar>& y, Scalar c,
                                Scalar d, Scalar* a, Scalar* b) {
  Scalar ss = 0, st = 0, tt = 0, sy = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar s = oracle_logistic({1, 0, c, d}, x[i]);
    const Scalar t = 1.0 - s;
    ss += s * s;
    st += s * t;
    tt += t * t;
    sy += s * y[i];
    ty += t * y[i];
  }
  const Scalar ridge = 1e-12 * (ss + tt) + 1e-300;
  const Scalar det = (ss + ridge) * (tt + ridge) - st * st;
  *a = ((tt + ridge) * sy - st * ty) / det;
  *b = ((ss + ridge) * ty - st * sy) / det;
  return oracle_fit_sse({*a, *b, c, d}, x, y);
}

// Brute-force global fit: dense scan of the (c, d) plane with (a, b)
// profiled out, then Nelder-Mead polish (two passes, the second with a
// fresh small simplex) of the best slices.
inline Scalar oracle_plcc(const std::vector<Scalar>& x,
                          const std::vector<Scalar>& y,
                          Scalar* sse_out = nullptr) {
  const std::size_t n = x.size();
  Scalar xmin = x[0], xmax = x[0];
  for (Scalar v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  const Scalar span = std::max(xmax - xmin, Scalar(1e-12));

  struct Cell {
    std::array<Scalar, 4> p;
    Scalar sse;
  };
  std::vector<Cell> cells;
  for (int ci = 0; ci <= 240; ++ci) {
    const Scalar c = xmin - 0.5 * span + (2.0 * span) * Scalar(ci) / 240.0;
    for (int di = 0; di <= 96; ++di) {
      // Log-spaced slopes from sharp steps to near-linear ramps.
      const Scalar d =
          span * std::exp(std::log(1e-3) +
                          (std::log(8.0) - std::log(1e-3)) * Scalar(di) / 96.0);
      Scalar a = 0, b = 0;
      const Scalar sse = oracle_profile_ab(x, y, c, d, &a, &b);
      if (std::isfinite(sse)) cells.push_back({{a, b, c, d}, sse});
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const Cell& p, const Cell& q) { return p.sse < q.sse; });

  std::array<Scalar, 4> best = cells.front().p;
  Scalar best_sse = cells.front().sse;
  for (std::size_t k = 0; k < cells.size() && k < 24; ++k) {
    std::array<Scalar, 4> p = cells[k].p;
    Scalar sse = cells[k].sse;
    for (const Scalar scale : {0.1, 0.02, 0.004, 0.0008}) {
      const Scalar ab = std::max(std::abs(p[0] - p[1]), Scalar(0.1));
      const std::array<Scalar, 4> step{scale * ab, -scale * ab,
                                       scale * 0.5 * span,
                                       scale * 2.5 * std::abs(p[3])};
      p = nelder_mead_fit(p, step, x, y, &sse);
    }
    if (std::isfinite(sse) && sse < best_sse) {
      best = p;
      best_sse = sse;
    }
  }
  if (sse_out != nullptr) *sse_out = best_sse;
  std::vector<Scalar> fx(n);
  for (std::size_t i = 0; i < n; ++i) fx[i] = oracle_logistic(best, x[i]);
  return brute_pearson(fx, y);
}

}  // namespace miqm_test

#endif  // MIQM_TESTS_ORACLE_CORRELATION_H_
