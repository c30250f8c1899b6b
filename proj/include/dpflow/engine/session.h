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

#ifndef DPFLOW_ENGINE_SESSION_H_
#define DPFLOW_ENGINE_SESSION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dpflow/engine/graph.h"
#include "dpflow/engine/tensor.h"

namespace dpflow::engine {

using FeedMap = std::map<NodeId, Tensor>;

// Owns the variable store for one graph. Single-threaded; one per rank.
class Session {
 public:
  explicit Session(const Graph& graph);

  const Graph& graph() const { return *graph_; }

  // Sets every variable from its initializer. Uniform draws for variable v are
  // keyed by (master_seed, v.index) only, so the result does not depend on
  // any other variable in the graph.
  void InitializeVariables(std::uint64_t master_seed);
  bool initialized() const { return initialized_; }

  // Evaluates `fetches`. Variables are read, never written.
  std::vector<Tensor> Run(std::span<const NodeId> fetches, const FeedMap& feeds = {});
  Tensor Run(NodeId fetch, const FeedMap& feeds = {});

  const Tensor& variable(NodeId var) const;

  // Replaces a variable's value; shape and dtype must match.
  void SetVariable(NodeId var, Tensor value);

  // value <- value + scale * delta, in place.
  void AssignDelta(NodeId var, const Tensor& delta, double scale);

  std::uint64_t run_count() const { return run_count_; }

 private:
  Tensor& mutable_variable(NodeId var);

  const Graph* graph_;
  std::vector<std::optional<Tensor>> variables_;  // indexed by NodeId
  bool initialized_ = false;
  std::uint64_t run_count_ = 0;
};

// Tensor produced by an initializer for variable `var` under `master_seed`.
Tensor InitialValue(const Graph& graph, NodeId var, std::uint64_t master_seed);

}  // namespace dpflow::engine

#endif  // DPFLOW_ENGINE_SESSION_H_
