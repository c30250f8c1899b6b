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

#ifndef DPFLOW_ENGINE_AUTODIFF_H_
#define DPFLOW_ENGINE_AUTODIFF_H_

#include <span>
#include <vector>

#include "dpflow/engine/graph.h"

namespace dpflow::engine {

// Appends the reverse-mode gradient subgraph of scalar `loss` with respect to
// each variable in `wrt` and returns the gradient nodes in `wrt` order.
// A variable the loss does not depend on gets a zeros constant.
std::vector<NodeId> Gradients(Graph& graph, NodeId loss, std::span<const NodeId> wrt);

}  // namespace dpflow::engine

#endif  // DPFLOW_ENGINE_AUTODIFF_H_
