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

#ifndef DPFLOW_ENGINE_GRAPH_H_
#define DPFLOW_ENGINE_GRAPH_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dpflow/engine/tensor.h"

namespace dpflow::engine {

// Dense creation-order index of a node. The ordering of NodeIds is the
// canonical variable order used for broadcast and gradient reduction.
struct NodeId {
  std::size_t index = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class OpKind : std::uint8_t {
  kPlaceholder,
  kVariable,
  kConstant,
  kMatMul,              // A[m,k] * B[k,n] -> [m,n]
  kAddBias,             // X[m,n] + b[n] broadcast over rows
  kReLU,
  kSoftmaxCrossEntropy, // mean over rows of -sum(onehot * log softmax(logits))
  kSumSquares,          // sum of x^2 -> scalar
  kScale,               // c * X
  // Kinds below are only emitted by Gradients().
  kAdd,                        // A + B, same shape
  kMatMulTransposeB,           // A[m,k] * B[n,k]^T -> [m,n]
  kMatMulTransposeA,           // A[k,m]^T * B[k,n] -> [m,n]
  kColumnSum,                  // X[m,n] -> [n]
  kReLUGrad,                   // (dY, X) -> dY * (X > 0)
  kSoftmaxCrossEntropyGrad,    // (dL, logits, y) -> dL * (softmax * rowsum(y) - y) / m
  kSoftmaxCrossEntropyLabelGrad,  // (dL, logits) -> -dL * log softmax / m
  kSumSquaresGrad,             // (dL, X) -> 2 * dL * X
};

const char* OpKindName(OpKind kind);

struct Initializer {
  enum class Scheme : std::uint8_t { kZeros, kConstant, kUniform, kGlorotUniform };

  Scheme scheme = Scheme::kZeros;
  double low = 0.0;   // kUniform lower bound, or kConstant value
  double high = 0.0;  // kUniform upper bound

  static Initializer Zeros() { return {}; }
  static Initializer Constant(double value) { return {Scheme::kConstant, value, value}; }
  static Initializer Uniform(double low, double high) { return {Scheme::kUniform, low, high}; }
  static Initializer GlorotUniform() { return {Scheme::kGlorotUniform, 0.0, 0.0}; }
};

struct Node {
  NodeId id;
  OpKind kind = OpKind::kPlaceholder;
  std::vector<NodeId> inputs;
  Shape shape;
  std::string name;
  double scale = 1.0;       // kScale only
  Initializer initializer;  // kVariable only
  Tensor constant;          // kConstant only
};

// An append-only DAG. Every node's inputs precede it, so the graph is acyclic
// by construction. Shapes are inferred and checked as nodes are added.
class Graph {
 public:
  explicit Graph(DType dtype = DType::kFloat64) : dtype_(dtype) {}

  DType dtype() const { return dtype_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const;
  std::span<const Node> nodes() const { return nodes_; }

  NodeId Placeholder(Shape shape, std::string name = "");
  NodeId Variable(Shape shape, Initializer init, std::string name = "");
  NodeId Constant(Tensor value, std::string name = "");

  // Adds a computational node after checking its inputs against the kind's
  // signature. Throws ShapeError on nonconforming shapes and dpflow::Error
  // on dangling input ids.
  NodeId Add(OpKind kind, std::vector<NodeId> inputs, double scale = 1.0, std::string name = "");

  NodeId MatMul(NodeId a, NodeId b) { return Add(OpKind::kMatMul, {a, b}); }
  NodeId AddBias(NodeId x, NodeId b) { return Add(OpKind::kAddBias, {x, b}); }
  NodeId ReLU(NodeId x) { return Add(OpKind::kReLU, {x}); }
  NodeId SoftmaxCrossEntropy(NodeId logits, NodeId onehot) {
    return Add(OpKind::kSoftmaxCrossEntropy, {logits, onehot});
  }
  NodeId SumSquares(NodeId x) { return Add(OpKind::kSumSquares, {x}); }
  NodeId Scale(NodeId x, double c) { return Add(OpKind::kScale, {x}, c); }

  // Variables in canonical (ascending id) order.
  std::vector<NodeId> Variables() const;

 private:
  Shape InferShape(OpKind kind, const std::vector<NodeId>& inputs) const;
  NodeId Append(Node node);

  DType dtype_;
  std::vector<Node> nodes_;
};

// Deterministic topological order over exactly the ancestors of `fetches`
// (inclusive). Ready nodes are released smallest id first.
std::vector<NodeId> TopoSchedule(const Graph& graph, std::span<const NodeId> fetches);

}  // namespace dpflow::engine

template <>
struct std::hash<dpflow::engine::NodeId> {
  std::size_t operator()(const dpflow::engine::NodeId& id) const noexcept {
    return std::hash<std::size_t>{}(id.index);
  }
};

#endif  // DPFLOW_ENGINE_GRAPH_H_
