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

#include "dpflow/engine/autodiff.h"

#include <string>

#include "dpflow/error.h"

namespace dpflow::engine {

std::vector<NodeId> Gradients(Graph& graph, NodeId loss, std::span<const NodeId> wrt) {
  if (!graph.node(loss).shape.empty()) {
    throw ShapeError("Gradients: loss must be scalar, got shape " +
                     ShapeString(graph.node(loss).shape));
  }
  for (NodeId v : wrt) {
    if (graph.node(v).kind != OpKind::kVariable) {
      throw Error("Gradients: node " + std::to_string(v.index) + " is not a variable");
    }
  }

  // Only nodes that both feed the loss and depend on some wrt variable carry
  // a gradient.
  const std::size_t end = loss.index + 1;
  std::vector<bool> feeds_loss(end, false);
  feeds_loss[loss.index] = true;
  for (std::size_t i = end; i-- > 0;) {
    if (!feeds_loss[i]) continue;
    for (NodeId in : graph.node(NodeId{i}).inputs) feeds_loss[in.index] = true;
  }
  std::vector<bool> on_path(end, false);
  for (NodeId v : wrt) {
    if (v.index < end) on_path[v.index] = feeds_loss[v.index];
  }
  for (std::size_t i = 0; i < end; ++i) {
    if (!feeds_loss[i] || on_path[i]) continue;
    for (NodeId in : graph.node(NodeId{i}).inputs) {
      if (on_path[in.index]) {
        on_path[i] = true;
        break;
      }
    }
  }

  std::vector<std::vector<NodeId>> contributions(end);
  auto accumulate = [&](std::size_t i) -> NodeId {
    const std::vector<NodeId>& parts = contributions[i];
    NodeId sum = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) sum = graph.Add(OpKind::kAdd, {sum, parts[k]});
    return sum;
  };

  if (on_path[loss.index]) {
    contributions[loss.index].push_back(graph.Constant(Tensor::Scalar(1.0), "grad_seed"));
  }

  for (std::size_t i = end; i-- > 0;) {
    if (!on_path[i] || contributions[i].empty()) continue;
    // Copy: graph.Add below may reallocate the node storage.
    const Node n = graph.node(NodeId{i});
    if (n.kind == OpKind::kVariable) continue;
    const NodeId g = accumulate(i);
    contributions[i] = {g};
    auto wants = [&](std::size_t k) { return on_path[n.inputs[k].index]; };
    auto push = [&](std::size_t k, NodeId grad) { contributions[n.inputs[k].index].push_back(grad); };

    switch (n.kind) {
      case OpKind::kMatMul:
        if (wants(0)) push(0, graph.Add(OpKind::kMatMulTransposeB, {g, n.inputs[1]}));
        if (wants(1)) push(1, graph.Add(OpKind::kMatMulTransposeA, {n.inputs[0], g}));
        break;
      case OpKind::kAddBias:
        if (wants(0)) push(0, g);
        if (wants(1)) push(1, graph.Add(OpKind::kColumnSum, {g}));
        break;
      case OpKind::kReLU:
        if (wants(0)) push(0, graph.Add(OpKind::kReLUGrad, {g, n.inputs[0]}));
        break;
      case OpKind::kSoftmaxCrossEntropy:
        if (wants(0)) {
          push(0, graph.Add(OpKind::kSoftmaxCrossEntropyGrad, {g, n.inputs[0], n.inputs[1]}));
        }
        if (wants(1)) push(1, graph.Add(OpKind::kSoftmaxCrossEntropyLabelGrad, {g, n.inputs[0]}));
        break;
      case OpKind::kSumSquares:
        if (wants(0)) push(0, graph.Add(OpKind::kSumSquaresGrad, {g, n.inputs[0]}));
        break;
      case OpKind::kScale:
        if (wants(0)) push(0, graph.Scale(g, n.scale));
        break;
      default:
        throw Error(std::string("Gradients: no gradient rule for ") + OpKindName(n.kind));
    }
  }

  std::vector<NodeId> out;
  out.reserve(wrt.size());
  for (NodeId v : wrt) {
    if (v.index < end && !contributions[v.index].empty()) {
      out.push_back(accumulate(v.index));
    } else {
      out.push_back(graph.Constant(Tensor(graph.node(v).shape), "zeros"));
    }
  }
  return out;
}

}  // namespace dpflow::engine
