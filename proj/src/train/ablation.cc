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

#include "train/ablation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "core/rng.h"

#include "eval/benchmark.h"
#include "masking/checkpoint.h"
#include "masking/enhanced.h"

namespace miqm {

namespace {

std::string sanitize(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

TrainResult train_variant(const TrainConfig& cfg, const Dataset& ds,
                          const std::string& dir,
                          std::shared_ptr<const DeepContext> deep,
                          std::ostream* log) {
  const SplitIndices split =
      holdout_by_reference(ds, cfg.val_fraction, cfg.seed);
  return train(cfg, ds, split, dir, deep, log);
}

nlohmann::json srcc_object(const std::string& checkpoint,
                           const std::vector<TestSet>& tests,
                           std::shared_ptr<const DeepContext> deep,
                           int short_side) {
  nlohmann::json out;
  for (const TestSet& t : tests) {
    out[t.name] = eval_checkpoint_srcc(checkpoint, t.ds, deep, short_side);
  }
  return out;
}

}  // namespace

Dataset subset_by_refs(const Dataset& ds, const std::vector<int>& refs) {
  Dataset out;
  out.name = ds.name;
  out.root = ds.root;
  for (const QualityRecord& r : ds.records) {
    if (std::find(refs.begin(), refs.end(), r.ref_id) != refs.end()) {
      out.records.push_back(r);
    }
  }
  return out;
}

Scalar eval_checkpoint_srcc(const std::string& checkpoint_path,
                            const Dataset& test,
                            std::shared_ptr<const DeepContext> deep,
                            int short_side) {
  const CheckpointData ck = load_checkpoint(checkpoint_path);
  const auto id = metric_from_name(ck.metric);
  if (!id.has_value()) {
    throw std::runtime_error("checkpoint names unknown metric " + ck.metric);
  }
  EnhancedMetric em(*id, deep, ck.init_seed);
  restore_store(ck, &em.params());
  std::vector<Scalar> scores = score_dataset(test, em, short_side);
  if (!metric_higher_better(*id)) {
    for (Scalar& s : scores) s = -s;
  }
  return srcc(scores, dataset_mos(test));
}

nlohmann::json run_ablation_levels(const TrainConfig& base,
                                   const Dataset& train_ds,
                                   const std::vector<TestSet>& tests,
                                   const std::string& out_dir,
                                   std::shared_ptr<const DeepContext> deep,
                                   std::ostream* log) {
  nlohmann::json report;
  report["kind"] = "levels";
  report["metric"] = metric_name(base.metric);
  nlohmann::json variants = nlohmann::json::array();
  for (int level = 1; level <= 6; ++level) {
    const bool all = level == 6;
    DatasetFilter filter;
    if (!all) filter.levels = {level};
    const Dataset ds = filter_dataset(train_ds, filter);
    const std::string name = all ? "all" : "level" + std::to_string(level);
    if (ds.records.empty()) {
      throw std::invalid_argument("level ablation: variant " + name +
                                  " selects no records");
    }
    if (log != nullptr) (*log) << "=== level variant " << name << "\n";
    const TrainResult r =
        train_variant(base, ds, out_dir + "/" + name, deep, log);
    nlohmann::json v;
    v["variant"] = name;
    v["levels"] = all ? std::vector<int>{1, 2, 3, 4, 5}
                      : std::vector<int>{level};
    v["checkpoint"] = r.best_checkpoint;
    v["srcc"] = srcc_object(r.best_checkpoint, tests, deep, base.short_side);
    variants.push_back(std::move(v));
  }
  report["variants"] = std::move(variants);
  return report;
}

nlohmann::json run_ablation_refs(const TrainConfig& base,
                                 const Dataset& train_ds,
                                 const std::vector<TestSet>& tests,
                                 const std::vector<int>& sizes,
                                 int runs_per_size, const std::string& out_dir,
                                 std::shared_ptr<const DeepContext> deep,
                                 std::ostream* log) {
  const std::vector<int> all_refs = unique_refs(train_ds);
  const int total = static_cast<int>(all_refs.size());
  nlohmann::json report;
  report["kind"] = "refs";
  report["metric"] = metric_name(base.metric);
  report["total_refs"] = total;
  nlohmann::json entries = nlohmann::json::array();
  for (const int size : sizes) {
    if (size <= 0 || size > total) {
      throw std::invalid_argument("refs ablation: size out of range");
    }
    // The full set has no sampling freedom, so one run suffices.
    const int runs = size == total ? 1 : runs_per_size;
    nlohmann::json entry;
    entry["size"] = size;
    nlohmann::json run_list = nlohmann::json::array();
    std::map<std::string, std::vector<Scalar>> per_test;
    for (int run = 0; run < runs; ++run) {
      std::vector<int> refs = all_refs;
      Rng rng = Rng::stream(base.seed, 3000 + 10 * size + run);
      rng.shuffle(refs);
      refs.resize(size);
      std::sort(refs.begin(), refs.end());
      const Dataset ds = subset_by_refs(train_ds, refs);
      TrainConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(run);
      const std::string dir = out_dir + "/refs" + std::to_string(size) +
                              "_run" + std::to_string(run);
      if (log != nullptr) (*log) << "=== refs " << size << " run " << run
                                 << "\n";
      const TrainResult r = train_variant(cfg, ds, dir, deep, log);
      nlohmann::json rj;
      rj["run"] = run;
      rj["seed"] = cfg.seed;
      rj["checkpoint"] = r.best_checkpoint;
      rj["srcc"] = srcc_object(r.best_checkpoint, tests, deep, base.short_side);
      for (const TestSet& t : tests) {
        per_test[t.name].push_back(rj["srcc"][t.name].get<Scalar>());
      }
      run_list.push_back(std::move(rj));
    }
    entry["runs"] = std::move(run_list);
    nlohmann::json mean_j, std_j;
    for (const auto& [name, vals] : per_test) {
      Scalar mean = 0;
      for (Scalar v : vals) mean += v / Scalar(vals.size());
      Scalar var = 0;
      if (vals.size() > 1) {
        for (Scalar v : vals) var += (v - mean) * (v - mean);
        var /= Scalar(vals.size() - 1);
      }
      mean_j[name] = mean;
      std_j[name] = std::sqrt(var);
    }
    entry["mean_srcc"] = std::move(mean_j);
    entry["std_srcc"] = std::move(std_j);
    entries.push_back(std::move(entry));
  }
  report["sizes"] = std::move(entries);
  return report;
}

nlohmann::json run_ablation_categories(const TrainConfig& base,
                                       const Dataset& train_ds,
                                       const std::vector<std::string>& groups,
                                       const std::string& group_json,
                                       const std::vector<TestSet>& tests,
                                       const std::string& out_dir,
                                       std::shared_ptr<const DeepContext> deep,
                                       std::ostream* log) {
  nlohmann::json report;
  report["kind"] = "categories";
  report["metric"] = metric_name(base.metric);
  nlohmann::json rows = nlohmann::json::array();

  // Untrained base-metric reference row.
  {
    nlohmann::json row;
    row["variant"] = std::string("base-") + metric_name(base.metric);
    nlohmann::json srccs;
    for (const TestSet& t : tests) {
      std::vector<Scalar> scores =
          score_dataset(t.ds, base.metric, deep.get(), base.short_side);
      if (!metric_higher_better(base.metric)) {
        for (Scalar& s : scores) s = -s;
      }
      srccs[t.name] = srcc(scores, dataset_mos(t.ds));
    }
    row["srcc"] = std::move(srccs);
    rows.push_back(std::move(row));
  }

  for (const std::string& group : groups) {
    DatasetFilter filter;
    filter.distortions = category_distortions(group_json, group);
    const Dataset ds = filter_dataset(train_ds, filter);
    if (ds.records.empty()) {
      throw std::invalid_argument("category ablation: group " + group +
                                  " selects no records");
    }
    if (log != nullptr) (*log) << "=== category variant " << group << "\n";
    const TrainResult r =
        train_variant(base, ds, out_dir + "/cat_" + sanitize(group), deep,
                      log);
    nlohmann::json row;
    row["variant"] = group;
    row["checkpoint"] = r.best_checkpoint;
    row["srcc"] = srcc_object(r.best_checkpoint, tests, deep, base.short_side);
    rows.push_back(std::move(row));
  }
  report["rows"] = std::move(rows);
  return report;
}

}  // namespace miqm
