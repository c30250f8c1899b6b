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

#ifndef DPFLOW_DATASETS_DATASET_H_
#define DPFLOW_DATASETS_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "dpflow/engine/tensor.h"
#include "dpflow/error.h"

namespace dpflow::datasets {

// n samples of d features with integer class labels.
struct Dataset {
  engine::Tensor inputs;  // [n, d], f64
  std::vector<int> labels;
  int classes = 2;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.rank() == 2 ? inputs.dim(1) : 0; }

  // Throws FormatError if rows and labels disagree or a label is out of range.
  void Validate() const;

  std::vector<std::size_t> LabelHistogram() const;
};

// Inputs and one-hot labels for the given sample indices.
struct Batch {
  engine::Tensor inputs;  // [m, d]
  engine::Tensor onehot;  // [m, classes]
};

Batch GatherBatch(const Dataset& data, std::span<const std::size_t> indices,
                  engine::DType dtype = engine::DType::kFloat64);

// MNIST-style IDX pair: images (magic 0x00000803, u8 pixels scaled to [0,1])
// and labels (magic 0x00000801). `classes` == 0 infers max(label) + 1, at
// least 2. Errors name the byte offset where parsing failed.
Dataset LoadIdx(const std::filesystem::path& images, const std::filesystem::path& labels,
                int classes = 0);
Dataset ParseIdx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                 int classes = 0);

// Comma-separated numeric table. A first row whose first field is not a number
// is treated as a header. `classes` == 0 infers max(label) + 1, at least 2.
// Errors carry the 1-based line number.
Dataset LoadCsv(const std::filesystem::path& path, std::size_t label_column, int classes = 0);
Dataset ParseCsv(std::string_view text, std::size_t label_column, int classes = 0);

// Writes the dataset with the label in `label_column` and values printed with
// 17 significant digits, so ParseCsv reproduces it exactly.
void WriteCsv(std::ostream& out, const Dataset& data, std::size_t label_column = 0,
              bool header = true);

// Class centers on scaled unit axes (+e_k, -e_k, then 2e_k, ...), labels drawn
// uniformly, Gaussian noise with standard deviation `sigma`. A pure function
// of its arguments.
Dataset Synthetic(std::uint64_t seed, std::size_t n, std::size_t d, int classes,
                  double sigma = 0.3);

// Center of class `c` used by Synthetic.
std::vector<double> SyntheticCenter(std::size_t d, int c);

// Malformed data-source string (as opposed to a bad file).
class DataSpecError : public Error {
 public:
  using Error::Error;
};

// "idx:<images>,<labels>", "csv:<path>,<label column>[,<classes>]" or
// "synthetic:<seed>,<n>,<d>,<classes>".
Dataset LoadDataSpec(std::string_view spec);

}  // namespace dpflow::datasets

#endif  // DPFLOW_DATASETS_DATASET_H_
