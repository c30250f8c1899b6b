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

#include "dpflow/engine/session.h"

#include <cmath>
#include <string>

#include "dpflow/engine/kernels.h"
#include "dpflow/engine/random.h"
#include "dpflow/error.h"

namespace dpflow::engine {

namespace {

std::string Describe(const Node& n) {
  std::string s = std::string(OpKindName(n.kind)) + " node " + std::to_string(n.id.index);
  if (!n.name.empty()) s += " '" + n.name + "'";
  return s;
}

}  // namespace

Tensor InitialValue(const Graph& graph, NodeId var, std::uint64_t master_seed) {
  const Node& n = graph.node(var);
  if (n.kind != OpKind::kVariable) throw Error(Describe(n) + " is not a variable");
  Tensor t(n.shape, graph.dtype());
  const Initializer& init = n.initializer;
  const CounterRng rng(master_seed, var.index);
  auto data = t.data();
  switch (init.scheme) {
    case Initializer::Scheme::kZeros:
      break;
    case Initializer::Scheme::kConstant:
      for (double& v : data) v = init.low;
      break;
    case Initializer::Scheme::kUniform:
      for (std::size_t i = 0; i < data.size(); ++i) data[i] = rng.Uniform(i, init.low, init.high);
      break;
    case Initializer::Scheme::kGlorotUniform: {
      const double fan_in = n.shape.empty() ? 1.0 : static_cast<double>(n.shape[0]);
      const double fan_out = n.shape.size() < 2 ? fan_in : static_cast<double>(n.shape[1]);
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (std::size_t i = 0; i < data.size(); ++i) data[i] = rng.Uniform(i, -limit, limit);
      break;
    }
  }
  t.RoundToDType();
  return t;
}

Session::Session(const Graph& graph) : graph_(&graph) {}

void Session::InitializeVariables(std::uint64_t master_seed) {
  variables_.assign(graph_->size(), std::nullopt);
  for (NodeId v : graph_->Variables()) variables_[v.index] = InitialValue(*graph_, v, master_seed);
  initialized_ = true;
}

const Tensor& Session::variable(NodeId var) const {
  if (!initialized_) throw Error("variables read before initialization");
  if (var.index >= variables_.size() || !variables_[var.index]) {
    throw Error("node " + std::to_string(var.index) + " is not a variable");
  }
  return *variables_[var.index];
}

Tensor& Session::mutable_variable(NodeId var) {
  return const_cast<Tensor&>(static_cast<const Session*>(this)->variable(var));
}

void Session::SetVariable(NodeId var, Tensor value) {
  Tensor& slot = mutable_variable(var);
  if (value.shape() != slot.shape()) {
    throw ShapeError("SetVariable: " + ShapeString(value.shape()) + " vs variable " +
                     ShapeString(slot.shape()));
  }
  slot = value.Cast(graph_->dtype());
}

void Session::AssignDelta(NodeId var, const Tensor& delta, double scale) {
  Tensor& slot = mutable_variable(var);
  if (delta.shape() != slot.shape()) {
    throw ShapeError("AssignDelta: delta " + ShapeString(delta.shape()) + " vs variable " +
                     ShapeString(slot.shape()));
  }
  auto w = slot.data();
  auto d = delta.data();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * d[i];
  slot.RoundToDType();
  if (!slot.AllFinite()) {
    throw NumericFault("AssignDelta produced a non-finite value in variable " +
                       std::to_string(var.index));
  }
}

Tensor Session::Run(NodeId fetch, const FeedMap& feeds) {
  const NodeId fetches[] = {fetch};
  return std::move(Run(fetches, feeds).front());
}

std::vector<Tensor> Session::Run(std::span<const NodeId> fetches, const FeedMap& feeds) {
  if (!initialized_) throw Error("Run called before variables were initialized");
  const Graph& g = *graph_;
  const std::vector<NodeId> order = TopoSchedule(g, fetches);
  std::vector<std::optional<Tensor>> values(g.size());
  auto in = [&](const Node& n, std::size_t i) -> const Tensor& { return *values[n.inputs[i].index]; };

  for (NodeId id : order) {
    const Node& n = g.node(id);
    Tensor out;
    switch (n.kind) {
      case OpKind::kPlaceholder: {
        auto it = feeds.find(id);
        if (it == feeds.end()) throw Error(Describe(n) + " was not fed");
        if (!ShapeMatches(n.shape, it->second.shape())) {
          throw ShapeError(Describe(n) + " fed " + ShapeString(it->second.shape()) +
                           ", declared " + ShapeString(n.shape));
        }
        out = it->second.Cast(g.dtype());
        break;
      }
      case OpKind::kVariable:
        out = variable(id);
        break;
      case OpKind::kConstant:
        out = n.constant;
        break;
      case OpKind::kMatMul:
        out = kernels::MatMul(in(n, 0), in(n, 1));
        break;
      case OpKind::kMatMulTransposeA:
        out = kernels::MatMulTransposeA(in(n, 0), in(n, 1));
        break;
      case OpKind::kMatMulTransposeB:
        out = kernels::MatMulTransposeB(in(n, 0), in(n, 1));
        break;
      case OpKind::kAddBias:
        out = kernels::AddBias(in(n, 0), in(n, 1));
        break;
      case OpKind::kAdd:
        out = kernels::Add(in(n, 0), in(n, 1));
        break;
      case OpKind::kReLU:
        out = kernels::ReLU(in(n, 0));
        break;
      case OpKind::kReLUGrad:
        out = kernels::ReLUGrad(in(n, 0), in(n, 1));
        break;
      case OpKind::kColumnSum:
        out = kernels::ColumnSum(in(n, 0));
        break;
      case OpKind::kScale:
        out = kernels::Scale(in(n, 0), n.scale);
        break;
      case OpKind::kSumSquares:
        out = kernels::SumSquares(in(n, 0));
        break;
      case OpKind::kSumSquaresGrad:
        out = kernels::SumSquaresGrad(in(n, 0), in(n, 1));
        break;
      case OpKind::kSoftmaxCrossEntropy:
        out = kernels::SoftmaxCrossEntropy(in(n, 0), in(n, 1));
        break;
      case OpKind::kSoftmaxCrossEntropyGrad:
        out = kernels::SoftmaxCrossEntropyGrad(in(n, 0), in(n, 1), in(n, 2));
        break;
      case OpKind::kSoftmaxCrossEntropyLabelGrad:
        out = kernels::SoftmaxCrossEntropyLabelGrad(in(n, 0), in(n, 1));
        break;
    }
    if (!ShapeMatches(n.shape, out.shape())) {
      throw ShapeError(Describe(n) + " produced " + ShapeString(out.shape()) + ", declared " +
                       ShapeString(n.shape));
    }
    if (!out.AllFinite()) throw NumericFault(Describe(n) + " produced a non-finite value");
    values[id.index] = std::move(out);
  }

  ++run_count_;
  std::vector<Tensor> results;
  results.reserve(fetches.size());
  for (NodeId f : fetches) results.push_back(*values[f.index]);
  return results;
}

}  // namespace dpflow::engine
