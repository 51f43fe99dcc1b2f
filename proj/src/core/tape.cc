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

#include "longseq/core/tape.h"

#include <ostream>

#include "longseq/core/error.h"

namespace longseq {

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::push(Node node) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  return Var(this, id);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = "leaf";
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.op = "param";
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = true;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id());
  return v;
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::record(std::string_view op, Tensor value, const std::vector<Var>& inputs,
                 Backward backward) {
  if (!value.all_finite()) {
    throw NumericError("non-finite value produced by op '" + std::string(op) + "'");
  }
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    if (v.tape() != this) throw StateError("op '" + std::string(op) + "' mixes tapes");
    n.inputs.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

const Tensor& Tape::value(NodeId id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.value;
}

Tensor& Tape::grad_buffer(NodeId id) {
  Node& n = nodes_[id];
  Tensor& g = n.param ? n.param->grad : n.grad;
  const Tensor& v = n.ref ? *n.ref : n.value;
  if (!g.same_shape(v)) g = Tensor(v.shape(), 0.0);
  n.has_grad = true;
  return g;
}

const Tensor* Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.param) return &n.param->grad;
  return n.has_grad ? &n.grad : nullptr;
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw StateError("backward root belongs to another tape");
  Tensor& seed = grad_buffer(root.id());
  for (double& g : seed.data()) g += 1.0;
  for (NodeId id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.ref ? *n.ref : n.value, n.grad);
  }
}

std::vector<const Tensor*> Tape::values_for_op(std::string_view op) const {
  std::vector<const Tensor*> out;
  for (const Node& n : nodes_) {
    if (n.op == op) out.push_back(n.ref ? n.ref : &n.value);
  }
  return out;
}

void Tape::dump(std::ostream& os) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    os << i << '\t' << n.op << '\t' << shape_string(value(static_cast<NodeId>(i)).shape());
    if (n.param) os << '\t' << n.param->name;
    os << '\t';
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      os << (k ? "," : "") << n.inputs[k];
    }
    os << '\n';
  }
}

}  // namespace longseq
