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

#include "data/dataset.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace miqm {
namespace {

namespace fs = std::filesystem;

std::string join(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (a.back() == '/') return a + b;
  return a + "/" + b;
}

std::string strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  return out;
}

// Parses "I23" / "A0042" style ids: the trailing integer of the stem.
int trailing_int(const std::string& stem) {
  size_t e = stem.size();
  while (e > 0 && std::isdigit(static_cast<unsigned char>(stem[e - 1]))) --e;
  if (e == stem.size()) return -1;
  return std::stoi(stem.substr(e));
}

// Splits "I12_03_04" into its underscore-separated integer fields after the
// leading id. Returns how many of ref/distortion/level were found.
struct NameFields {
  int ref_id = -1;
  int distortion = -1;
  int level = -1;
};
NameFields parse_triplet(const std::string& stem) {
  NameFields f;
  std::vector<std::string> parts;
  std::stringstream ss(stem);
  std::string p;
  while (std::getline(ss, p, '_')) parts.push_back(p);
  if (!parts.empty()) f.ref_id = trailing_int(parts[0]);
  auto as_int = [](const std::string& s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    }
    return s.empty() ? -1 : std::stoi(s);
  };
  if (parts.size() >= 2) f.distortion = as_int(parts[1]);
  if (parts.size() >= 3) f.level = as_int(parts[2]);
  return f;
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

// Resolves a file whose on-disk case may differ (TID2013 ships I01.BMP).
std::string resolve_case(const std::string& dir, const std::string& name) {
  const std::string exact = join(dir, name);
  if (fs::exists(exact)) return exact;
  std::string upper = name, lower = name;
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  for (char& c : lower) c = static_cast<char>(std::tolower(c));
  for (const std::string& cand : {upper, lower}) {
    const std::string p = join(dir, cand);
    if (fs::exists(p)) return p;
  }
  // Mixed-case stems (i01.BMP): scan once.
  std::string want = lower;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::string have = entry.path().filename().string();
      for (char& c : have) c = static_cast<char>(std::tolower(c));
      if (have == want) return entry.path().string();
    }
  }
  throw std::runtime_error("cannot find " + name + " under " + dir);
}

void minmax_normalize(std::vector<QualityRecord>* records) {
  if (records->empty()) return;
  Scalar lo = records->front().raw_score, hi = lo;
  for (const QualityRecord& r : *records) {
    lo = std::min(lo, r.raw_score);
    hi = std::max(hi, r.raw_score);
  }
  for (QualityRecord& r : *records) {
    r.mos = hi > lo ? (r.raw_score - lo) / (hi - lo) : Scalar(0.5);
  }
}

}  // namespace

Dataset load_kadid(const std::string& root) {
  Dataset ds;
  ds.name = "kadid10k";
  ds.root = root;
  std::ifstream in(join(root, "dmos.csv"));
  if (!in) throw std::runtime_error("kadid10k: cannot open dmos.csv in " + root);
  std::string line;
  std::getline(in, line);  // header: dist_img,ref_img,dmos,var
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw std::runtime_error("kadid10k: bad line: " + line);
    QualityRecord r;
    r.dist_path = join(join(root, "images"), f[0]);
    r.ref_path = join(join(root, "images"), f[1]);
    r.raw_score = std::stod(f[2]);
    // dmos in [1,5], 5 = imperceptible.
    r.mos = (r.raw_score - 1.0) / 4.0;
    const NameFields nf = parse_triplet(stem_of(f[0]));
    r.ref_id = nf.ref_id;
    r.distortion = nf.distortion;
    r.level = nf.level;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset load_tid2013(const std::string& root) {
  Dataset ds;
  ds.name = "tid2013";
  ds.root = root;
  std::ifstream in(join(root, "mos_with_names.txt"));
  if (!in) {
    throw std::runtime_error("tid2013: cannot open mos_with_names.txt in " +
                             root);
  }
  const std::string ref_dir = join(root, "reference_images");
  const std::string dist_dir = join(root, "distorted_images");
  std::string line;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    QualityRecord r;
    std::string name;
    ss >> r.raw_score >> name;
    if (name.empty()) throw std::runtime_error("tid2013: bad line: " + line);
    r.mos = r.raw_score / 9.0;  // MOS scale [0,9]
    const NameFields nf = parse_triplet(stem_of(name));
    r.ref_id = nf.ref_id;
    r.distortion = nf.distortion;
    r.level = nf.level;
    r.dist_path = resolve_case(dist_dir, name);
    char ref_name[16];
    std::snprintf(ref_name, sizeof(ref_name), "I%02d.BMP", r.ref_id);
    r.ref_path = resolve_case(ref_dir, ref_name);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset load_csiq(const std::string& root) {
  Dataset ds;
  ds.name = "csiq";
  ds.root = root;
  std::ifstream in(join(root, "csiq_dmos.csv"));
  if (!in) {
    throw std::runtime_error("csiq: cannot open csiq_dmos.csv in " + root);
  }
  std::string line;
  std::getline(in, line);  // header: dis_img,ref_img,dmos
  std::map<std::string, int> ref_ids;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw std::runtime_error("csiq: bad line: " + line);
    QualityRecord r;
    r.dist_path = join(root, f[0]);
    r.ref_path = join(root, f[1]);
    r.raw_score = std::stod(f[2]);
    r.mos = 1.0 - r.raw_score;  // dmos in [0,1], lower = better
    const std::string ref_stem = stem_of(f[1]);
    auto it = ref_ids.find(ref_stem);
    if (it == ref_ids.end()) {
      it = ref_ids.emplace(ref_stem, static_cast<int>(ref_ids.size()) + 1)
               .first;
    }
    r.ref_id = it->second;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset load_pipal(const std::string& root) {
  Dataset ds;
  ds.name = "pipal";
  ds.root = root;
  const std::string label_dir = join(root, "Train_Label");
  if (!fs::is_directory(label_dir)) {
    throw std::runtime_error("pipal: missing Train_Label under " + root);
  }
  // Distorted images are spread over Distortion_* subdirectories.
  std::vector<std::string> dist_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string base = entry.path().filename().string();
    if (entry.is_directory() && base.rfind("Distortion", 0) == 0) {
      dist_dirs.push_back(entry.path().string());
    }
  }
  std::sort(dist_dirs.begin(), dist_dirs.end());
  std::vector<std::string> labels;
  for (const auto& entry : fs::directory_iterator(label_dir)) {
    if (entry.path().extension() == ".txt") {
      labels.push_back(entry.path().string());
    }
  }
  std::sort(labels.begin(), labels.end());
  for (const std::string& label : labels) {
    std::ifstream in(label);
    std::string line;
    while (std::getline(in, line)) {
      line = strip(line);
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() < 2) throw std::runtime_error("pipal: bad line: " + line);
      QualityRecord r;
      r.raw_score = std::stod(f[1]);
      const NameFields nf = parse_triplet(stem_of(f[0]));
      r.ref_id = nf.ref_id;
      r.distortion = nf.distortion;
      r.level = nf.level;
      bool found = false;
      for (const std::string& dir : dist_dirs) {
        const std::string cand = join(dir, f[0]);
        if (fs::exists(cand)) {
          r.dist_path = cand;
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::runtime_error("pipal: distorted image not found: " + f[0]);
      }
      const std::string ref_stem = stem_of(f[0]).substr(0, 5);  // A0001
      r.ref_path = resolve_case(join(root, "Train_Ref"), ref_stem + ".bmp");
      ds.records.push_back(std::move(r));
    }
  }
  minmax_normalize(&ds.records);  // elo-style scores, empirical bounds
  return ds;
}

Dataset load_csv(const std::string& csv_path) {
  Dataset ds;
  ds.name = "csv";
  ds.root = fs::path(csv_path).parent_path().string();
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header: ref_path,dist_path,score
  std::map<std::string, int> ref_ids;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw std::runtime_error("csv: bad line: " + line);
    QualityRecord r;
    r.ref_path = fs::path(f[0]).is_absolute() ? f[0] : join(ds.root, f[0]);
    r.dist_path = fs::path(f[1]).is_absolute() ? f[1] : join(ds.root, f[1]);
    r.raw_score = std::stod(f[2]);
    auto it = ref_ids.find(f[0]);
    if (it == ref_ids.end()) {
      it = ref_ids.emplace(f[0], static_cast<int>(ref_ids.size()) + 1).first;
    }
    r.ref_id = it->second;
    ds.records.push_back(std::move(r));
  }
  minmax_normalize(&ds.records);
  return ds;
}

Dataset load_dataset(const std::string& kind, const std::string& root) {
  if (kind == "kadid10k") return load_kadid(root);
  if (kind == "tid2013") return load_tid2013(root);
  if (kind == "csiq") return load_csiq(root);
  if (kind == "pipal") return load_pipal(root);
  if (kind == "csv") return load_csv(root);
  throw std::invalid_argument("unknown dataset kind: " + kind);
}

std::vector<int> unique_refs(const Dataset& ds) {
  std::set<int> ids;
  for (const QualityRecord& r : ds.records) ids.insert(r.ref_id);
  return std::vector<int>(ids.begin(), ids.end());
}

SplitIndices holdout_by_reference(const Dataset& ds, Scalar val_fraction,
                                  std::uint64_t seed) {
  std::vector<int> refs = unique_refs(ds);
  if (refs.empty()) return {};
  Rng rng = Rng::stream(seed, 2);
  rng.shuffle(refs);
  const size_t n_val = std::max<size_t>(
      1, static_cast<size_t>(val_fraction * static_cast<Scalar>(refs.size())));
  std::set<int> val_refs(refs.begin(),
                         refs.begin() + static_cast<std::ptrdiff_t>(
                                            std::min(n_val, refs.size())));
  SplitIndices out;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    if (val_refs.count(ds.records[i].ref_id)) {
      out.val.push_back(static_cast<int>(i));
    } else {
      out.train.push_back(static_cast<int>(i));
    }
  }
  return out;
}

Dataset filter_dataset(const Dataset& ds, const DatasetFilter& filter) {
  std::set<int> keep_refs;
  if (filter.max_refs >= 0) {
    std::vector<int> refs = unique_refs(ds);
    const size_t n = std::min<size_t>(static_cast<size_t>(filter.max_refs),
                                      refs.size());
    keep_refs.insert(refs.begin(),
                     refs.begin() + static_cast<std::ptrdiff_t>(n));
  }
  Dataset out;
  out.name = ds.name;
  out.root = ds.root;
  for (const QualityRecord& r : ds.records) {
    if (!filter.levels.empty() &&
        std::find(filter.levels.begin(), filter.levels.end(), r.level) ==
            filter.levels.end()) {
      continue;
    }
    if (!filter.distortions.empty() &&
        std::find(filter.distortions.begin(), filter.distortions.end(),
                  r.distortion) == filter.distortions.end()) {
      continue;
    }
    if (filter.max_refs >= 0 && !keep_refs.count(r.ref_id)) continue;
    out.records.push_back(r);
  }
  return out;
}

std::vector<int> category_distortions(const std::string& json_path,
                                      const std::string& category) {
  if (category == "all" || category.empty()) return {};
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path);
  nlohmann::json groups;
  in >> groups;
  std::set<int> ids;
  std::stringstream ss(category);
  std::string part;
  while (std::getline(ss, part, '&')) {
    part = strip(part);
    if (!groups.contains(part)) {
      throw std::invalid_argument("unknown category group: " + part);
    }
    for (const auto& v : groups.at(part)) ids.insert(v.get<int>());
  }
  return std::vector<int>(ids.begin(), ids.end());
}

}  // namespace miqm
