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

#ifndef MIQM_CORE_TENSOR_H_
#define MIQM_CORE_TENSOR_H_

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

namespace miqm {

// All numerics run in double; tensors are serialized as little-endian
// float32 (see checkpoint format).
using Scalar = double;

// Dense row-major tensor. Images and feature maps use rank-3 [H, W, C]
// layout with C fastest; vectors are rank 1, conv weights rank 4
// [KH, KW, IC, OC].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(numel_of(shape_), Scalar(0));
  }
  Tensor(std::initializer_list<int> shape) : Tensor(std::vector<int>(shape)) {}

  static Tensor hwc(int h, int w, int c) { return Tensor({h, w, c}); }
  static Tensor full(std::vector<int> shape, Scalar v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  // Rank-3 accessors.
  int h() const { assert(rank() == 3); return shape_[0]; }
  int w() const { assert(rank() == 3); return shape_[1]; }
  int c() const { assert(rank() == 3); return shape_[2]; }
  Scalar& at(int y, int x, int ch) {
    return data_[(static_cast<size_t>(y) * shape_[1] + x) * shape_[2] + ch];
  }
  const Scalar& at(int y, int x, int ch) const {
    return data_[(static_cast<size_t>(y) * shape_[1] + x) * shape_[2] + ch];
  }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  Scalar& operator[](std::int64_t i) { return data_[static_cast<size_t>(i)]; }
  Scalar operator[](std::int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

  static std::int64_t numel_of(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<Scalar> data_;
};

}  // namespace miqm

#endif  // MIQM_CORE_TENSOR_H_
