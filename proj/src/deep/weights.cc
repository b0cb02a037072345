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

#include "deep/weights.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "core/sha256.h"
#include "json.hpp"

namespace miqm {
namespace {

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  if (dir.back() == '/') return dir + file;
  return dir + "/" + file;
}

std::string dir_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  if (pos == std::string::npos) return "";
  return path.substr(0, pos);
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> bytes(static_cast<size_t>(n));
  if (n > 0) in.read(reinterpret_cast<char*>(bytes.data()), n);
  if (!in) throw std::runtime_error("short read on " + path);
  return bytes;
}

}  // namespace

WeightManifest WeightManifest::load(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "miqm-weights-v1") {
    throw std::runtime_error("unsupported weight manifest format in " +
                             manifest_path);
  }
  WeightManifest m;
  m.dir_ = dir_of(manifest_path);
  for (const auto& [name, spec] : j.at("tensors").items()) {
    if (spec.value("dtype", "") != "float32") {
      throw std::runtime_error("tensor " + name + ": unsupported dtype");
    }
    WeightEntry e;
    e.file = spec.at("file").get<std::string>();
    e.byte_length = spec.at("byte_length").get<std::int64_t>();
    e.sha256 = spec.at("sha256").get<std::string>();
    e.shape = spec.at("shape").get<std::vector<int>>();
    m.entries_[name] = std::move(e);
  }
  return m;
}

bool WeightManifest::has(const std::string& name) const {
  return entries_.count(name) != 0;
}

std::vector<std::string> WeightManifest::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

Tensor WeightManifest::tensor(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::runtime_error("weight tensor not in manifest: " + name);
  }
  const WeightEntry& e = it->second;
  const auto bytes = read_file_bytes(join_path(dir_, e.file));
  if (static_cast<std::int64_t>(bytes.size()) != e.byte_length) {
    throw std::runtime_error("weight tensor " + name + ": size mismatch");
  }
  const std::string digest = sha256_hex(bytes.data(), bytes.size());
  if (digest != e.sha256) {
    throw std::runtime_error("weight tensor " + name + ": sha256 mismatch");
  }
  Tensor t(e.shape);
  if (t.numel() * 4 != e.byte_length) {
    throw std::runtime_error("weight tensor " + name +
                             ": shape does not match byte length");
  }
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    float v;
    std::memcpy(&v, bytes.data() + i * 4, 4);
    t[i] = static_cast<Scalar>(v);
  }
  return t;
}

void write_weight_manifest(const std::string& dir,
                           const std::string& manifest_name,
                           const std::map<std::string, Tensor>& tensors) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [name, t] : tensors) {
    std::string file = name;
    for (char& c : file) {
      if (c == '.' || c == '/') c = '_';
    }
    file += ".bin";
    std::vector<unsigned char> bytes(static_cast<size_t>(t.numel()) * 4);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      const float v = static_cast<float>(t[i]);
      std::memcpy(bytes.data() + i * 4, &v, 4);
    }
    std::ofstream out(join_path(dir, file), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + join_path(dir, file));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    nlohmann::json e;
    e["file"] = file;
    e["byte_length"] = static_cast<std::int64_t>(bytes.size());
    e["sha256"] = sha256_hex(bytes.data(), bytes.size());
    e["shape"] = t.shape();
    e["dtype"] = "float32";
    entries[name] = std::move(e);
  }
  nlohmann::json j = {{"format", "miqm-weights-v1"}, {"tensors", entries}};
  std::ofstream out(join_path(dir, manifest_name));
  if (!out) {
    throw std::runtime_error("cannot write manifest in " + dir);
  }
  out << j.dump(2) << "\n";
}

}  // namespace miqm
