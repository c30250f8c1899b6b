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
#include "dpflow/engine/random.h"
#include "dpflow/error.h"

namespace dpflow::datasets {

namespace {

constexpr double kCenterScale = 2.0;

}  // namespace

std::vector<double> SyntheticCenter(std::size_t d, int c) {
  std::vector<double> center(d, 0.0);
  const std::size_t k = static_cast<std::size_t>(c) % d;
  const std::size_t lap = static_cast<std::size_t>(c) / d;
  const double sign = lap % 2 == 0 ? 1.0 : -1.0;
  center[k] = sign * kCenterScale * static_cast<double>(1 + lap / 2);
  return center;
}

Dataset Synthetic(std::uint64_t seed, std::size_t n, std::size_t d, int classes, double sigma) {
  if (n == 0 || d == 0 || classes < 2) {
    throw Error("synthetic dataset needs n >= 1, d >= 1, classes >= 2");
  }
  const engine::CounterRng label_rng(seed, 0);
  const engine::CounterRng noise_rng(seed, 1);
  std::vector<std::vector<double>> centers;
  for (int c = 0; c < classes; ++c) centers.push_back(SyntheticCenter(d, c));

  Dataset out;
  out.classes = classes;
  out.labels.resize(n);
  out.inputs = engine::Tensor({n, d});
  auto x = out.inputs.data();
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(label_rng.Bits(i) % static_cast<std::uint64_t>(classes));
    out.labels[i] = y;
    for (std::size_t j = 0; j < d; ++j) {
      const double noise = sigma == 0.0 ? 0.0 : sigma * noise_rng.Normal(i * d + j);
      x[i * d + j] = centers[y][j] + noise;
    }
  }
  return out;
}

}  // namespace dpflow::datasets
