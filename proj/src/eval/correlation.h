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

#ifndef MIQM_EVAL_CORRELATION_H_
#define MIQM_EVAL_CORRELATION_H_

#include <vector>

#include "core/tensor.h"

namespace miqm {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<Scalar> average_ranks(const std::vector<Scalar>& v);

// Pearson correlation; 0 when either column has zero variance.
Scalar pearson(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

// Spearman rank correlation: Pearson on average ranks (tie-safe, unlike
// the 6*sum(d^2) shortcut).
Scalar srcc(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

// Kendall tau-b (tie-corrected), computed in O(n log n) with Knight's
// merge-sort inversion count.
Scalar krcc(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

// Four-parameter monotone logistic f(x) = (a-b)/(1+exp(-(x-c)/|d|)) + b.
// When `fallback` is set the nonlinear fit was not possible (too few points,
// degenerate scores, or no finite optimum) and f(x) = lin_p*x + lin_q is the
// least-squares line instead.
struct LogisticFit {
  Scalar a = 0;
  Scalar b = 0;
  Scalar c = 0;
  Scalar d = 1;
  Scalar lin_p = 0;
  Scalar lin_q = 0;
  Scalar sse = 0;
  bool fallback = false;
};

Scalar logistic4(const LogisticFit& fit, Scalar x);

// Nonlinear least squares via Levenberg-Marquardt. Initialization: a = max y,
// b = min y, c = median x, d = sample std of x; five starts (one plain, four
// with jittered c and d from a fixed internal seed) plus a deterministic
// quantile x slope grid with (a, b) profiled out in closed form; lowest
// residual wins. The grid keeps the fit out of spurious local basins on
// hard inputs, which restarts alone do not guarantee.
LogisticFit fit_logistic4(const std::vector<Scalar>& x,
                          const std::vector<Scalar>& y);

// Pearson correlation between f(x) and y after fitting f. The fit makes the
// result invariant under affine maps of x and folds orientation into the
// sign of a-b, so anti-correlated scores report the same magnitude.
Scalar plcc_fitted(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                   LogisticFit* fit_out = nullptr);

}  // namespace miqm

#endif  // MIQM_EVAL_CORRELATION_H_
