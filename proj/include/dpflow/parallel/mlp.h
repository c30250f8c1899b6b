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

#ifndef DPFLOW_PARALLEL_MLP_H_
#define DPFLOW_PARALLEL_MLP_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "dpflow/engine/graph.h"

namespace dpflow::parallel {

// A fully connected ReLU network with softmax cross-entropy loss. The batch
// dimension of `inputs` and `labels` is dynamic.
//
// The model owns its graph; sessions keep a pointer to it, so a model must
// stay put (and alive) while sessions built from it exist.
struct MlpModel {
  engine::Graph graph;
  engine::NodeId inputs;
  engine::NodeId labels;
  engine::NodeId logits;
  engine::NodeId loss;
  std::vector<engine::NodeId> variables;  // canonical order: W0, b0, W1, b1, ...
  std::vector<engine::NodeId> gradients;  // aligned with variables
  std::vector<std::size_t> layer_sizes;
};

// layer_sizes = {d, h1, ..., classes}; at least two entries.
MlpModel BuildMlp(std::vector<std::size_t> layer_sizes,
                  engine::DType dtype = engine::DType::kFloat64);

// Parses "mlp:784-128-10".
std::vector<std::size_t> ParseMlpSpec(std::string_view spec);

}  // namespace dpflow::parallel

#endif  // DPFLOW_PARALLEL_MLP_H_
