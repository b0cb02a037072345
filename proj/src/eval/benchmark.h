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

#ifndef MIQM_EVAL_BENCHMARK_H_
#define MIQM_EVAL_BENCHMARK_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "data/dataset.h"
#include "data/preprocess.h"
#include "deep/deep_metrics.h"
#include "eval/correlation.h"
#include "masking/enhanced.h"
#include "metrics/common.h"

namespace miqm {

// Scores one pair with a plain (unmasked) metric. `deep` may be null for
// metrics that do not use backbone features.
Scalar evaluate_base_metric(MetricId id, const Tensor& ref, const Tensor& dist,
                            const DeepContext* deep);

// Scores every record, with references loaded once and short-side resizing
// applied to both images. `log` (optional) receives progress lines.
std::vector<Scalar> score_dataset(const Dataset& ds, MetricId id,
                                  const DeepContext* deep,
                                  int short_side = kShortSide,
                                  std::ostream* log = nullptr);
std::vector<Scalar> score_dataset(const Dataset& ds, const EnhancedMetric& em,
                                  int short_side = kShortSide,
                                  std::ostream* log = nullptr);

std::vector<Scalar> dataset_mos(const Dataset& ds);

// One benchmark-table row: correlations of a score column against MOS.
struct BenchmarkRow {
  std::string dataset;
  std::string metric;
  Scalar plcc = 0;
  Scalar srcc = 0;
  Scalar krcc = 0;
  int n = 0;
  LogisticFit fit;
  std::string flags;
};

// Computes the row. Scores of lower-is-better metrics are negated first so
// that well-behaved metrics correlate positively with MOS.
BenchmarkRow correlate_column(const std::string& dataset_name,
                              const std::string& metric_label,
                              std::vector<Scalar> scores,
                              const std::vector<Scalar>& mos,
                              bool higher_better);

std::string benchmark_csv_header();
std::string benchmark_csv_row(const BenchmarkRow& row);

}  // namespace miqm

#endif  // MIQM_EVAL_BENCHMARK_H_
