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

#ifndef MIQM_AUTODIFF_GRAPH_H_
#define MIQM_AUTODIFF_GRAPH_H_

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "core/tensor.h"

namespace miqm {

// Reverse-mode tape node. Nodes form a DAG through `parents`; gradients
// accumulate into `grad` (allocated on first use).
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad/value and accumulates into parent grads.
  std::function<void(Node&)> backward_fn;

  Tensor& ensure_grad() {
    if (grad.empty() && value.numel() > 0) grad = Tensor(value.shape());
    return grad;
  }
};

// Value-semantics handle over a shared graph node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Var constant(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    return Var(n);
  }
  // Leaf with requires_grad set; used for inputs under test and for
  // trainable parameters.
  static Var leaf(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    n->requires_grad = true;
    return Var(n);
  }

  bool valid() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& ensure_grad() { return node_->ensure_grad(); }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad() { node_->grad = Tensor(); }

  // Scalar convenience for rank-0/1 single-element nodes.
  Scalar item() const { return node_->value[0]; }

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Runs reverse-mode accumulation from `root`, which must hold a single
// element. Seeds d(root)/d(root) = 1.
void backward(const Var& root);

// Builds an op node. `fwd` has already produced `value`.
Var make_op(Tensor value, std::vector<Var> parents,
            std::function<void(Node&)> backward_fn);

}  // namespace miqm

#endif  // MIQM_AUTODIFF_GRAPH_H_
