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

#include "eval/benchmark.h"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "data/preprocess.h"
#include "metrics/classic.h"
#include "metrics/flip.h"

namespace miqm {

namespace {

using RefCache = std::unordered_map<std::string, Tensor>;

const Tensor& cached_ref(RefCache* cache, const std::string& path,
                         int short_side) {
  auto it = cache->find(path);
  if (it == cache->end()) {
    it = cache->emplace(path, load_and_preprocess(path, short_side)).first;
  }
  return it->second;
}

template <typename ScoreFn>
std::vector<Scalar> score_records(const Dataset& ds, int short_side,
                                  std::ostream* log, const ScoreFn& fn) {
  std::vector<Scalar> scores(ds.records.size());
  RefCache cache;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const QualityRecord& rec = ds.records[i];
    const Tensor& ref = cached_ref(&cache, rec.ref_path, short_side);
    const Tensor dist = load_and_preprocess(rec.dist_path, short_side);
    scores[i] = fn(ref, dist);
    if (log != nullptr && ((i + 1) % 100 == 0 || i + 1 == ds.records.size())) {
      (*log) << "  scored " << (i + 1) << "/" << ds.records.size() << " on "
             << ds.name << "\n";
      log->flush();
    }
  }
  return scores;
}

}  // namespace

Scalar evaluate_base_metric(MetricId id, const Tensor& ref, const Tensor& dist,
                            const DeepContext* deep) {
  switch (id) {
    case MetricId::kMae:
    case MetricId::kPsnr:
    case MetricId::kSsim:
    case MetricId::kMsSsim:
      return evaluate_classic(id, ref, dist).score;
    case MetricId::kFlip:
      return evaluate_flip(ref, dist).score;
    case MetricId::kVggL1:
    case MetricId::kLpips:
    case MetricId::kDists:
      if (deep == nullptr) {
        throw std::invalid_argument(
            "evaluate_base_metric: feature metric needs a backbone context");
      }
      return evaluate_deep(*deep, id, ref, dist).score;
  }
  throw std::logic_error("evaluate_base_metric: unknown metric");
}

std::vector<Scalar> score_dataset(const Dataset& ds, MetricId id,
                                  const DeepContext* deep, int short_side,
                                  std::ostream* log) {
  return score_records(ds, short_side, log,
                       [&](const Tensor& r, const Tensor& d) {
                         return evaluate_base_metric(id, r, d, deep);
                       });
}

std::vector<Scalar> score_dataset(const Dataset& ds, const EnhancedMetric& em,
                                  int short_side, std::ostream* log) {
  return score_records(ds, short_side, log,
                       [&](const Tensor& r, const Tensor& d) {
                         return em.evaluate(r, d).score;
                       });
}

std::vector<Scalar> dataset_mos(const Dataset& ds) {
  std::vector<Scalar> mos(ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    mos[i] = ds.records[i].mos;
  }
  return mos;
}

BenchmarkRow correlate_column(const std::string& dataset_name,
                              const std::string& metric_label,
                              std::vector<Scalar> scores,
                              const std::vector<Scalar>& mos,
                              bool higher_better) {
  if (!higher_better) {
    for (Scalar& s : scores) s = -s;
  }
  BenchmarkRow row;
  row.dataset = dataset_name;
  row.metric = metric_label;
  row.n = static_cast<int>(scores.size());
  row.srcc = srcc(scores, mos);
  row.krcc = krcc(scores, mos);
  row.plcc = plcc_fitted(scores, mos, &row.fit);
  if (row.fit.fallback) row.flags = "fallback";
  return row;
}

std::string benchmark_csv_header() {
  return "dataset,metric,plcc,srcc,krcc,n,fit_a,fit_b,fit_c,fit_d,flags";
}

std::string benchmark_csv_row(const BenchmarkRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%.6f,%.6f,%.6f,%d,%.8g,%.8g,%.8g,%.8g,%s",
                row.dataset.c_str(), row.metric.c_str(), row.plcc, row.srcc,
                row.krcc, row.n, row.fit.a, row.fit.b, row.fit.c, row.fit.d,
                row.flags.c_str());
  return std::string(buf);
}

}  // namespace miqm
