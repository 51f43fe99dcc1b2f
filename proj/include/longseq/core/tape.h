// Copyright 2026 The LongSeq Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "longseq/core/parameter.h"
#include "longseq/core/tensor.h"

namespace longseq {

class Tape;
using NodeId = std::int32_t;

// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
// tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  NodeId id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Tape* tape_ = nullptr;
  NodeId id_ = -1;
};

// Define-by-run reverse-mode tape. Nodes are appended in evaluation order, so
// every node's inputs have smaller ids. One tape per forward pass; never
// shared between threads.
class Tape {
 public:
  // Receives the node's own output value and its accumulated gradient.
  using Backward =
      std::function<void(Tape&, const Tensor& out, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Non-differentiable input.
  Var constant(Tensor value);
  // Differentiable leaf whose gradient is stored on the tape.
  Var leaf(Tensor value);
  // Leaf bound to a Parameter; gradients accumulate into `p.grad`. Repeated
  // calls for the same parameter return the same node.
  Var param(Parameter& p);

  // Appends an operator node. Throws NumericError if `value` has a
  // non-finite entry.
  Var record(std::string_view op, Tensor value, std::initializer_list<Var> inputs,
             Backward backward);
  Var record(std::string_view op, Tensor value, const std::vector<Var>& inputs,
             Backward backward);

  // Seeds d(root)/d(root) = 1 (elementwise ones for non-scalar roots) and
  // propagates to every reachable node.
  void backward(Var root);

  const Tensor& value(NodeId id) const;
  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }
  // Gradient accumulator for `id`, zero-initialised on first use.
  Tensor& grad_buffer(NodeId id);
  // nullptr when no gradient reached the node.
  const Tensor* grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  std::string_view op(NodeId id) const { return nodes_[id].op; }
  std::vector<NodeId> inputs(NodeId id) const { return nodes_[id].inputs; }
  std::vector<const Tensor*> values_for_op(std::string_view op) const;

  // Line-delimited debug records: id, op, shape, input ids.
  void dump(std::ostream& os) const;

 private:
  struct Node {
    std::string_view op;
    Tensor value;
    const Tensor* ref = nullptr;
    Parameter* param = nullptr;
    std::vector<NodeId> inputs;
    Backward backward;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> param_nodes_;
};

}  // namespace longseq
