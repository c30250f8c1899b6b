/* Copyright 2026 The dpflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dpflow/engine/graph.h"

#include <functional>
#include <queue>
#include <string>

#include "dpflow/error.h"

namespace dpflow::engine {

const char* OpKindName(OpKind kind) {
  switch (kind) {
    case OpKind::kPlaceholder: return "Placeholder";
    case OpKind::kVariable: return "Variable";
    case OpKind::kConstant: return "Constant";
    case OpKind::kMatMul: return "MatMul";
    case OpKind::kAddBias: return "AddBias";
    case OpKind::kReLU: return "ReLU";
    case OpKind::kSoftmaxCrossEntropy: return "SoftmaxCrossEntropy";
    case OpKind::kSumSquares: return "SumSquares";
    case OpKind::kScale: return "Scale";
    case OpKind::kAdd: return "Add";
    case OpKind::kMatMulTransposeB: return "MatMulTransposeB";
    case OpKind::kMatMulTransposeA: return "MatMulTransposeA";
    case OpKind::kColumnSum: return "ColumnSum";
    case OpKind::kReLUGrad: return "ReLUGrad";
    case OpKind::kSoftmaxCrossEntropyGrad: return "SoftmaxCrossEntropyGrad";
    case OpKind::kSoftmaxCrossEntropyLabelGrad: return "SoftmaxCrossEntropyLabelGrad";
    case OpKind::kSumSquaresGrad: return "SumSquaresGrad";
  }
  return "?";
}

namespace {

bool DimsCompatible(std::size_t a, std::size_t b) {
  return a == b || a == kDynamicDim || b == kDynamicDim;
}

std::size_t MergeDim(std::size_t a, std::size_t b) { return a == kDynamicDim ? b : a; }

bool ShapesCompatible(const Shape& a, const Shape& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!DimsCompatible(a[i], b[i])) return false;
  }
  return true;
}

Shape MergeShapes(const Shape& a, const Shape& b) {
  Shape out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = MergeDim(a[i], b[i]);
  return out;
}

[[noreturn]] void Mismatch(OpKind kind, const char* what, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(OpKindName(kind)) + ": " + what + ": " + ShapeString(a) +
                   " vs " + ShapeString(b));
}

void ExpectRank(OpKind kind, const Shape& s, std::size_t rank) {
  if (s.size() != rank) {
    throw ShapeError(std::string(OpKindName(kind)) + ": expected rank " + std::to_string(rank) +
                     " operand, got " + ShapeString(s));
  }
}

std::size_t Arity(OpKind kind) {
  switch (kind) {
    case OpKind::kPlaceholder:
    case OpKind::kVariable:
    case OpKind::kConstant:
      return 0;
    case OpKind::kReLU:
    case OpKind::kSumSquares:
    case OpKind::kScale:
    case OpKind::kColumnSum:
      return 1;
    case OpKind::kSoftmaxCrossEntropyGrad:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

const Node& Graph::node(NodeId id) const {
  if (id.index >= nodes_.size()) {
    throw Error("unknown node id " + std::to_string(id.index));
  }
  return nodes_[id.index];
}

NodeId Graph::Append(Node node) {
  node.id = NodeId{nodes_.size()};
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

NodeId Graph::Placeholder(Shape shape, std::string name) {
  Node n;
  n.kind = OpKind::kPlaceholder;
  n.shape = std::move(shape);
  n.name = std::move(name);
  return Append(std::move(n));
}

NodeId Graph::Variable(Shape shape, Initializer init, std::string name) {
  if (!IsFullyDefined(shape)) {
    throw ShapeError("variable shape must be fully defined, got " + ShapeString(shape));
  }
  Node n;
  n.kind = OpKind::kVariable;
  n.shape = std::move(shape);
  n.initializer = init;
  n.name = std::move(name);
  return Append(std::move(n));
}

NodeId Graph::Constant(Tensor value, std::string name) {
  Node n;
  n.kind = OpKind::kConstant;
  n.shape = value.shape();
  value = value.Cast(dtype_);
  n.constant = std::move(value);
  n.name = std::move(name);
  return Append(std::move(n));
}

NodeId Graph::Add(OpKind kind, std::vector<NodeId> inputs, double scale, std::string name) {
  if (Arity(kind) == 0) {
    throw Error(std::string(OpKindName(kind)) + " nodes are created with their own constructor");
  }
  if (inputs.size() != Arity(kind)) {
    throw Error(std::string(OpKindName(kind)) + " takes " + std::to_string(Arity(kind)) +
                " inputs, got " + std::to_string(inputs.size()));
  }
  for (NodeId in : inputs) {
    if (in.index >= nodes_.size()) {
      throw Error(std::string(OpKindName(kind)) + ": input references unknown node " +
                  std::to_string(in.index));
    }
  }
  Node n;
  n.kind = kind;
  n.shape = InferShape(kind, inputs);
  n.inputs = std::move(inputs);
  n.scale = scale;
  n.name = std::move(name);
  return Append(std::move(n));
}

Shape Graph::InferShape(OpKind kind, const std::vector<NodeId>& inputs) const {
  auto shape_of = [&](std::size_t i) -> const Shape& { return nodes_[inputs[i].index].shape; };
  switch (kind) {
    case OpKind::kMatMul: {
      const Shape& a = shape_of(0);
      const Shape& b = shape_of(1);
      ExpectRank(kind, a, 2);
      ExpectRank(kind, b, 2);
      if (!DimsCompatible(a[1], b[0])) Mismatch(kind, "inner dimensions differ", a, b);
      return {a[0], b[1]};
    }
    case OpKind::kMatMulTransposeB: {
      const Shape& a = shape_of(0);
      const Shape& b = shape_of(1);
      ExpectRank(kind, a, 2);
      ExpectRank(kind, b, 2);
      if (!DimsCompatible(a[1], b[1])) Mismatch(kind, "inner dimensions differ", a, b);
      return {a[0], b[0]};
    }
    case OpKind::kMatMulTransposeA: {
      const Shape& a = shape_of(0);
      const Shape& b = shape_of(1);
      ExpectRank(kind, a, 2);
      ExpectRank(kind, b, 2);
      if (!DimsCompatible(a[0], b[0])) Mismatch(kind, "inner dimensions differ", a, b);
      return {a[1], b[1]};
    }
    case OpKind::kAddBias: {
      const Shape& x = shape_of(0);
      const Shape& b = shape_of(1);
      ExpectRank(kind, x, 2);
      ExpectRank(kind, b, 1);
      if (!DimsCompatible(x[1], b[0])) Mismatch(kind, "bias length differs from columns", x, b);
      return {x[0], MergeDim(x[1], b[0])};
    }
    case OpKind::kAdd:
    case OpKind::kReLUGrad: {
      const Shape& a = shape_of(0);
      const Shape& b = shape_of(1);
      if (!ShapesCompatible(a, b)) Mismatch(kind, "operand shapes differ", a, b);
      return MergeShapes(a, b);
    }
    case OpKind::kReLU:
    case OpKind::kScale:
      return shape_of(0);
    case OpKind::kColumnSum: {
      const Shape& x = shape_of(0);
      ExpectRank(kind, x, 2);
      return {x[1]};
    }
    case OpKind::kSumSquares:
      return {};
    case OpKind::kSumSquaresGrad: {
      ExpectRank(kind, shape_of(0), 0);
      return shape_of(1);
    }
    case OpKind::kSoftmaxCrossEntropy: {
      const Shape& logits = shape_of(0);
      const Shape& onehot = shape_of(1);
      ExpectRank(kind, logits, 2);
      if (!ShapesCompatible(logits, onehot)) Mismatch(kind, "logits and labels differ", logits, onehot);
      return {};
    }
    case OpKind::kSoftmaxCrossEntropyGrad: {
      ExpectRank(kind, shape_of(0), 0);
      const Shape& logits = shape_of(1);
      const Shape& onehot = shape_of(2);
      ExpectRank(kind, logits, 2);
      if (!ShapesCompatible(logits, onehot)) Mismatch(kind, "logits and labels differ", logits, onehot);
      return MergeShapes(logits, onehot);
    }
    case OpKind::kSoftmaxCrossEntropyLabelGrad: {
      ExpectRank(kind, shape_of(0), 0);
      ExpectRank(kind, shape_of(1), 2);
      return shape_of(1);
    }
    case OpKind::kPlaceholder:
    case OpKind::kVariable:
    case OpKind::kConstant:
      break;
  }
  throw Error("no shape rule for " + std::string(OpKindName(kind)));
}

std::vector<NodeId> Graph::Variables() const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (n.kind == OpKind::kVariable) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> TopoSchedule(const Graph& graph, std::span<const NodeId> fetches) {
  const std::size_t n = graph.size();
  std::vector<bool> needed(n, false);
  std::vector<std::size_t> stack;
  for (NodeId f : fetches) {
    graph.node(f);
    if (!needed[f.index]) {
      needed[f.index] = true;
      stack.push_back(f.index);
    }
  }
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    for (NodeId in : graph.nodes()[i].inputs) {
      if (!needed[in.index]) {
        needed[in.index] = true;
        stack.push_back(in.index);
      }
    }
  }

  // Kahn's algorithm restricted to the ancestor set.
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<std::size_t>> consumers(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!needed[i]) continue;
    for (NodeId in : graph.nodes()[i].inputs) {
      ++pending[i];
      consumers[in.index].push_back(i);
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (needed[i] && pending[i] == 0) ready.push(i);
  }
  std::vector<NodeId> order;
  while (!ready.empty()) {
    std::size_t i = ready.top();
    ready.pop();
    order.push_back(NodeId{i});
    for (std::size_t c : consumers[i]) {
      if (--pending[c] == 0) ready.push(c);
    }
  }
  return order;
}

}  // namespace dpflow::engine
