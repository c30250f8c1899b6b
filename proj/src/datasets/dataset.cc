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

#include "dpflow/datasets/dataset.h"

#include <string>

#include "dpflow/error.h"

namespace dpflow::datasets {

void Dataset::Validate() const {
  if (classes < 2) throw FormatError("dataset needs at least 2 classes, got " + std::to_string(classes));
  if (inputs.rank() != 2) {
    throw FormatError("dataset inputs must be [n, d], got " + engine::ShapeString(inputs.shape()));
  }
  if (inputs.dim(0) != labels.size()) {
    throw FormatError("dataset has " + std::to_string(inputs.dim(0)) + " rows but " +
                      std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw FormatError("label " + std::to_string(labels[i]) + " of sample " + std::to_string(i) +
                        " is outside [0, " + std::to_string(classes) + ")");
    }
  }
}

std::vector<std::size_t> Dataset::LabelHistogram() const {
  std::vector<std::size_t> counts(classes, 0);
  for (int y : labels) ++counts.at(y);
  return counts;
}

Batch GatherBatch(const Dataset& data, std::span<const std::size_t> indices, engine::DType dtype) {
  const std::size_t m = indices.size();
  const std::size_t d = data.dim();
  const std::size_t c = static_cast<std::size_t>(data.classes);
  Batch b{engine::Tensor({m, d}, dtype), engine::Tensor({m, c}, dtype)};
  auto src = data.inputs.data();
  auto x = b.inputs.data();
  auto y = b.onehot.data();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t row = indices[i];
    if (row >= data.size()) throw Error("sample index " + std::to_string(row) + " out of range");
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = src[row * d + j];
    y[i * c + static_cast<std::size_t>(data.labels[row])] = 1.0;
  }
  b.inputs.RoundToDType();
  return b;
}

}  // namespace dpflow::datasets
