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

#include "eval/correlation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "core/rng.h"

namespace miqm {

namespace {

void check_columns(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation: column sizes differ");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("correlation: need at least two pairs");
  }
}

Scalar sample_std(const std::vector<Scalar>& v) {
  const Scalar mean =
      std::accumulate(v.begin(), v.end(), Scalar(0)) / Scalar(v.size());
  Scalar ss = 0;
  for (Scalar e : v) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / Scalar(v.size() - 1));
}

// sqrt-based denominators can push a perfect correlation a few ulps past 1.
Scalar clamp_corr(Scalar r) { return std::min(Scalar(1), std::max(Scalar(-1), r)); }

Scalar median(std::vector<Scalar> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Overflow-free logistic.
Scalar stable_sigmoid(Scalar z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (1.0 + e);
}

// Pairs (i < j in x-sorted order) with y[i] > y[j], counted by merge sort.
// Equal values are not inversions.
std::int64_t count_inversions(std::vector<Scalar>& v, std::vector<Scalar>& tmp,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, tmp, lo, mid) +
                     count_inversions(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return inv;
}

std::int64_t tie_pairs(const std::vector<Scalar>& sorted) {
  std::int64_t total = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const std::int64_t t = static_cast<std::int64_t>(j - i);
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

struct FitProblem {
  const std::vector<Scalar>& x;
  const std::vector<Scalar>& y;
};

Scalar fit_sse(const FitProblem& p, Scalar a, Scalar b, Scalar c, Scalar d) {
  const Scalar ad = std::max(std::abs(d), Scalar(1e-12));
  Scalar sse = 0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const Scalar f = (a - b) * stable_sigmoid((p.x[i] - c) / ad) + b;
    const Scalar r = f - p.y[i];
    sse += r * r;
  }
  return sse;
}

struct LmResult {
  Scalar a, b, c, d, sse;
  bool ok;
};

// Levenberg-Marquardt on the four logistic parameters.
LmResult lm_fit(const FitProblem& p, Scalar a, Scalar b, Scalar c, Scalar d) {
  const std::size_t n = p.x.size();
  Scalar sse = fit_sse(p, a, b, c, d);
  Scalar lambda = 1e-3;
  for (int iter = 0; iter < 300; ++iter) {
    const Scalar ad = std::max(std::abs(d), Scalar(1e-12));
    const Scalar dsign = d >= 0 ? 1.0 : -1.0;
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar z = (p.x[i] - c) / ad;
      const Scalar s = stable_sigmoid(z);
      const Scalar sp = s * (1.0 - s);
      const Scalar r = (a - b) * s + b - p.y[i];
      Eigen::Vector4d j;
      j(0) = s;
      j(1) = 1.0 - s;
      j(2) = -(a - b) * sp / ad;
      j(3) = -(a - b) * sp * (p.x[i] - c) * dsign / (ad * ad);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    bool moved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      for (int k = 0; k < 4; ++k) {
        damped(k, k) += lambda * std::max(jtj(k, k), Scalar(1e-12));
      }
      const Eigen::Vector4d delta = damped.ldlt().solve(-jtr);
      const Scalar na = a + delta(0), nb = b + delta(1);
      const Scalar nc = c + delta(2), nd = d + delta(3);
      const Scalar nsse = fit_sse(p, na, nb, nc, nd);
      if (std::isfinite(nsse) && nsse < sse) {
        const Scalar drop = sse - nsse;
        a = na;
        b = nb;
        c = nc;
        d = nd;
        sse = nsse;
        lambda = std::max(lambda / 3.0, Scalar(1e-12));
        moved = true;
        if (drop <= 1e-15 * std::max(Scalar(1), sse)) iter = 300;
        break;
      }
      lambda *= 3.0;
      if (lambda > 1e14) break;
    }
    if (!moved) break;
  }
  const bool ok = std::isfinite(sse) && std::isfinite(a) && std::isfinite(b) &&
                  std::isfinite(c) && std::isfinite(d);
  return {a, b, c, std::abs(d), sse, ok};
}

// With (c, d) fixed the model is linear in (a, b): f = a*s + b*(1-s) with
// s = sigmoid((x-c)/|d|). Solving that 2x2 least-squares problem exactly
// turns every (c, d) proposal into the best fit on its slice, which makes
// the global search over the two nonlinear parameters cheap and reliable.
Scalar profile_ab(const FitProblem& p, Scalar c, Scalar d, Scalar* a,
                  Scalar* b) {
  const Scalar ad = std::max(std::abs(d), Scalar(1e-12));
  Scalar ss = 0, st = 0, tt = 0, sy = 0, ty = 0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const Scalar s = stable_sigmoid((p.x[i] - c) / ad);
    const Scalar t = 1.0 - s;
    ss += s * s;
    st += s * t;
    tt += t * t;
    sy += s * p.y[i];
    ty += t * p.y[i];
  }
  const Scalar ridge = 1e-12 * (ss + tt) + 1e-300;
  const Scalar det = (ss + ridge) * (tt + ridge) - st * st;
  *a = ((tt + ridge) * sy - st * ty) / det;
  *b = ((ss + ridge) * ty - st * sy) / det;
  return fit_sse(p, *a, *b, c, d);
}

void linear_fallback(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                     LogisticFit* fit) {
  const std::size_t n = x.size();
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= Scalar(n);
  my /= Scalar(n);
  Scalar sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit->fallback = true;
  fit->lin_p = sxx > 0 ? sxy / sxx : 0;
  fit->lin_q = my - fit->lin_p * mx;
  Scalar sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar r = fit->lin_p * x[i] + fit->lin_q - y[i];
    sse += r * r;
  }
  fit->sse = sse;
}

}  // namespace

std::vector<Scalar> average_ranks(const std::vector<Scalar>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<Scalar> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // Positions i+1 .. j (1-based) share the mean rank.
    const Scalar r = 0.5 * (Scalar(i + 1) + Scalar(j));
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

Scalar pearson(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  check_columns(x, y);
  const std::size_t n = x.size();
  Scalar mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= Scalar(n);
  my /= Scalar(n);
  Scalar sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar dx = x[i] - mx;
    const Scalar dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0 || syy <= 0) return 0;
  return clamp_corr(sxy / (std::sqrt(sxx) * std::sqrt(syy)));
}

Scalar srcc(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  check_columns(x, y);
  return pearson(average_ranks(x), average_ranks(y));
}

Scalar krcc(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  check_columns(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&x, &y](std::size_t a, std::size_t b) {
              if (x[a] != x[b]) return x[a] < x[b];
              return y[a] < y[b];
            });

  // Tied pairs in x, and joint ties, from the x-sorted sweep.
  std::int64_t n1 = 0, n3 = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i + 1;
      while (j < n && x[order[j]] == x[order[i]]) ++j;
      const std::int64_t t = static_cast<std::int64_t>(j - i);
      n1 += t * (t - 1) / 2;
      std::size_t a = i;
      while (a < j) {
        std::size_t b = a + 1;
        while (b < j && y[order[b]] == y[order[a]]) ++b;
        const std::int64_t u = static_cast<std::int64_t>(b - a);
        n3 += u * (u - 1) / 2;
        a = b;
      }
      i = j;
    }
  }

  std::vector<Scalar> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<Scalar> tmp(n);
  const std::int64_t swaps = count_inversions(ys, tmp, 0, n);
  // ys is sorted now; reuse it for the y tie count.
  const std::int64_t n2 = tie_pairs(ys);

  const std::int64_t n0 = static_cast<std::int64_t>(n) *
                          static_cast<std::int64_t>(n - 1) / 2;
  const Scalar den = std::sqrt(Scalar(n0 - n1)) * std::sqrt(Scalar(n0 - n2));
  if (den <= 0) return 0;
  return clamp_corr(Scalar(n0 - n1 - n2 + n3 - 2 * swaps) / den);
}

Scalar logistic4(const LogisticFit& fit, Scalar x) {
  if (fit.fallback) return fit.lin_p * x + fit.lin_q;
  const Scalar ad = std::max(std::abs(fit.d), Scalar(1e-12));
  return (fit.a - fit.b) * stable_sigmoid((x - fit.c) / ad) + fit.b;
}

LogisticFit fit_logistic4(const std::vector<Scalar>& x,
                          const std::vector<Scalar>& y) {
  check_columns(x, y);
  LogisticFit fit;
  const Scalar sx = sample_std(x);
  if (x.size() < 4 || sx <= 0) {
    linear_fallback(x, y, &fit);
    return fit;
  }
  const Scalar a0 = *std::max_element(y.begin(), y.end());
  const Scalar b0 = *std::min_element(y.begin(), y.end());
  const Scalar c0 = median(x);
  const FitProblem problem{x, y};

  struct Start {
    Scalar a, b, c, d, sse;
  };
  std::vector<Start> starts;

  // The plain initialization plus four jittered ones, with a fixed internal
  // seed so fits are reproducible run to run.
  Rng jitter = Rng::stream(0x109157C4, 0);
  for (int start = 0; start < 5; ++start) {
    Scalar c = c0, d = sx;
    if (start > 0) {
      c = c0 + (jitter.uniform() - 0.5) * sx;
      d = sx * std::exp((jitter.uniform() - 0.5) * 2.0 * std::log(2.0));
    }
    starts.push_back({a0, b0, c, d, fit_sse(problem, a0, b0, c, d)});
  }

  // The logistic family has several basins (flat fits, step fits at any
  // data gap, smooth slopes), so restarts alone are not dependable. Scan a
  // deterministic quantile x slope grid with (a, b) profiled out and polish
  // the most promising slices; the best residual wins.
  {
    std::vector<Scalar> xs = x;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    // Step fits live at gaps between neighboring scores; enumerate every
    // midpoint when that is cheap, otherwise fall back to quantiles.
    std::vector<Scalar> cs;
    if (xs.size() <= 17) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        cs.push_back(xs[i]);
        if (i + 1 < xs.size()) cs.push_back(0.5 * (xs[i] + xs[i + 1]));
      }
    } else {
      for (int q = 0; q <= 10; ++q) {
        const Scalar pos = Scalar(q) / 10.0 * Scalar(xs.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        cs.push_back(xs[lo] + (pos - Scalar(lo)) * (xs[hi] - xs[lo]));
      }
    }
    std::vector<Start> grid;
    for (const Scalar frac :
         {0.005, 0.01, 0.02, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 6.0}) {
      const Scalar d = frac * sx;
      for (const Scalar c : cs) {
        Scalar a = 0, b = 0;
        const Scalar sse = profile_ab(problem, c, d, &a, &b);
        if (std::isfinite(sse)) grid.push_back({a, b, c, d, sse});
      }
    }
    std::sort(grid.begin(), grid.end(),
              [](const Start& p, const Start& q) { return p.sse < q.sse; });
    for (std::size_t i = 0; i < grid.size() && i < 16; ++i) {
      starts.push_back(grid[i]);
    }
  }

  bool have = false;
  LmResult best{0, 0, 0, 0, 0, false};
  for (const Start& s : starts) {
    const LmResult r = lm_fit(problem, s.a, s.b, s.c, s.d);
    if (r.ok && (!have || r.sse < best.sse)) {
      best = r;
      have = true;
    }
  }
  if (!have) {
    linear_fallback(x, y, &fit);
    return fit;
  }
  fit.a = best.a;
  fit.b = best.b;
  fit.c = best.c;
  fit.d = best.d;
  fit.sse = best.sse;
  return fit;
}

Scalar plcc_fitted(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                   LogisticFit* fit_out) {
  const LogisticFit fit = fit_logistic4(x, y);
  if (fit_out != nullptr) *fit_out = fit;
  std::vector<Scalar> fx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = logistic4(fit, x[i]);
  return pearson(fx, y);
}

}  // namespace miqm
