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

#include "dpflow/parallel/mlp.h"

#include <charconv>
#include <string>

#include "dpflow/engine/autodiff.h"
#include "dpflow/error.h"

namespace dpflow::parallel {

using engine::Initializer;
using engine::kDynamicDim;
using engine::NodeId;

MlpModel BuildMlp(std::vector<std::size_t> layer_sizes, engine::DType dtype) {
  if (layer_sizes.size() < 2) throw Error("mlp needs at least an input and an output width");
  for (std::size_t w : layer_sizes) {
    if (w == 0) throw ShapeError("mlp layer widths must be positive");
  }
  MlpModel m{engine::Graph(dtype), {}, {}, {}, {}, {}, {}, std::move(layer_sizes)};
  const auto& sizes = m.layer_sizes;
  m.inputs = m.graph.Placeholder({kDynamicDim, sizes.front()}, "inputs");
  m.labels = m.graph.Placeholder({kDynamicDim, sizes.back()}, "labels");

  NodeId h = m.inputs;
  const std::size_t layers = sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string suffix = std::to_string(l);
    NodeId w = m.graph.Variable({sizes[l], sizes[l + 1]}, Initializer::GlorotUniform(), "W" + suffix);
    NodeId b = m.graph.Variable({sizes[l + 1]}, Initializer::Zeros(), "b" + suffix);
    m.variables.push_back(w);
    m.variables.push_back(b);
    h = m.graph.AddBias(m.graph.MatMul(h, w), b);
    if (l + 1 < layers) h = m.graph.ReLU(h);
  }
  m.logits = h;
  m.loss = m.graph.SoftmaxCrossEntropy(m.logits, m.labels);
  m.gradients = engine::Gradients(m.graph, m.loss, m.variables);
  return m;
}

std::vector<std::size_t> ParseMlpSpec(std::string_view spec) {
  constexpr std::string_view kPrefix = "mlp:";
  if (spec.substr(0, kPrefix.size()) != kPrefix) {
    throw Error("model spec must look like mlp:784-128-10, got '" + std::string(spec) + "'");
  }
  std::string_view rest = spec.substr(kPrefix.size());
  std::vector<std::size_t> sizes;
  while (true) {
    std::size_t dash = rest.find('-');
    std::string_view field = rest.substr(0, dash);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || value == 0) {
      throw Error("bad layer width '" + std::string(field) + "' in model spec '" +
                  std::string(spec) + "'");
    }
    sizes.push_back(value);
    if (dash == std::string_view::npos) break;
    rest = rest.substr(dash + 1);
  }
  if (sizes.size() < 2) throw Error("model spec '" + std::string(spec) + "' needs at least two widths");
  return sizes;
}

}  // namespace dpflow::parallel
