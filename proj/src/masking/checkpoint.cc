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

#include "masking/checkpoint.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace miqm {
namespace {

constexpr std::int64_t kAlign = 64;

std::int64_t align_up(std::int64_t x) { return (x + kAlign - 1) & ~(kAlign - 1); }

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  // Tensors are laid out in name order so the file is canonical for a given
  // state regardless of registration order; offsets are relative to the
  // data section, so the manifest text does not depend on its own length.
  std::vector<const std::pair<std::string, Tensor>*> ordered;
  ordered.reserve(data.tensors.size());
  for (const auto& kv : data.tensors) ordered.push_back(&kv);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->first == ordered[i - 1]->first) {
      throw std::invalid_argument("duplicate checkpoint tensor " +
                                  ordered[i]->first);
    }
  }
  nlohmann::json tensors = nlohmann::json::object();
  std::int64_t off = 0;
  for (const auto* kv : ordered) {
    nlohmann::json e;
    e["dtype"] = "float32";
    e["shape"] = kv->second.shape();
    e["offset"] = off;
    tensors[kv->first] = std::move(e);
    off = align_up(off + kv->second.numel() * 4);
  }
  nlohmann::json manifest;
  manifest["metric"] = data.metric;
  manifest["layers"] = data.layers;
  manifest["init_seed"] = std::to_string(data.init_seed);
  manifest["config_digest"] = data.config_digest;
  manifest["epoch"] = data.epoch;
  manifest["step"] = data.step;
  if (data.has_best_val) manifest["best_val"] = data.best_val;
  manifest["tensors"] = std::move(tensors);
  const std::string text = manifest.dump();  // keys sorted, deterministic

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kCheckpointMagic, 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const std::int64_t data_start =
      align_up(8 + static_cast<std::int64_t>(text.size()));
  for (std::int64_t p = 8 + static_cast<std::int64_t>(text.size());
       p < data_start; ++p) {
    out.put('\0');
  }
  std::int64_t pos = 0;
  for (const auto* kv : ordered) {
    const Tensor& t = kv->second;
    std::vector<char> bytes(static_cast<size_t>(t.numel()) * 4);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      const float v = static_cast<float>(t[i]);
      std::memcpy(bytes.data() + i * 4, &v, 4);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    const std::int64_t next = align_up(pos + t.numel() * 4);
    for (std::int64_t p = pos + t.numel() * 4; p < next; ++p) out.put('\0');
    pos = next;
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw std::runtime_error(path + ": not a checkpoint file");
  }
  nlohmann::json manifest;
  in >> manifest;
  if (!in) throw std::runtime_error(path + ": bad checkpoint manifest");
  const std::int64_t data_start =
      align_up(static_cast<std::int64_t>(in.tellg()));

  CheckpointData data;
  data.metric = manifest.at("metric").get<std::string>();
  data.layers = manifest.at("layers").get<std::vector<std::string>>();
  data.init_seed = std::stoull(manifest.at("init_seed").get<std::string>());
  data.config_digest = manifest.at("config_digest").get<std::string>();
  data.epoch = manifest.at("epoch").get<int>();
  data.step = manifest.at("step").get<std::int64_t>();
  if (manifest.contains("best_val")) {
    data.best_val = manifest.at("best_val").get<Scalar>();
    data.has_best_val = true;
  }
  for (const auto& [name, e] : manifest.at("tensors").items()) {
    if (e.value("dtype", "") != "float32") {
      throw std::runtime_error(path + ": unsupported tensor dtype");
    }
    Tensor t(e.at("shape").get<std::vector<int>>());
    const std::int64_t off = e.at("offset").get<std::int64_t>();
    in.clear();
    in.seekg(data_start + off);
    std::vector<char> bytes(static_cast<size_t>(t.numel()) * 4);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw std::runtime_error(path + ": truncated tensor " + name);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      float v;
      std::memcpy(&v, bytes.data() + i * 4, 4);
      t[i] = static_cast<Scalar>(v);
    }
    data.tensors.emplace_back(name, std::move(t));
  }
  return data;
}

void append_store(const ParamStore& store, CheckpointData* out) {
  for (const Param& p : store.params()) {
    out->tensors.emplace_back(p.name, p.var.value());
  }
}

void restore_store(const CheckpointData& data, ParamStore* store) {
  for (Param& p : store->params()) {
    const Tensor* found = nullptr;
    for (const auto& [name, t] : data.tensors) {
      if (name == p.name) {
        found = &t;
        break;
      }
    }
    if (found == nullptr) {
      throw std::runtime_error("checkpoint missing tensor " + p.name);
    }
    if (found->shape() != p.var.value().shape()) {
      throw std::runtime_error("checkpoint tensor " + p.name +
                               " has shape " + found->shape_str() +
                               ", expected " + p.var.value().shape_str());
    }
    p.var.mutable_value() = *found;
  }
}

}  // namespace miqm
