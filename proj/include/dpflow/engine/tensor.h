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

#ifndef DPFLOW_ENGINE_TENSOR_H_
#define DPFLOW_ENGINE_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dpflow::engine {

enum class DType : std::uint8_t { kFloat64 = 0, kFloat32 = 1 };

const char* DTypeName(DType dtype);

using Shape = std::vector<std::size_t>;

// Marks a dimension whose size is only known when the graph runs (the batch
// dimension of a placeholder). Never appears in a runtime Tensor.
inline constexpr std::size_t kDynamicDim = std::numeric_limits<std::size_t>::max();

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);
bool IsFullyDefined(const Shape& shape);

// True when `runtime` is an instance of `declared` (dynamic dims match any size).
bool ShapeMatches(const Shape& declared, const Shape& runtime);

// Dense row-major array. Values are held in double precision; a kFloat32 tensor
// keeps every element exactly representable as a float.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, DType dtype = DType::kFloat64);
  Tensor(Shape shape, std::vector<double> data, DType dtype = DType::kFloat64);

  static Tensor Scalar(double value, DType dtype = DType::kFloat64);

  const Shape& shape() const { return shape_; }
  DType dtype() const { return dtype_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  // Row-major 2-D access.
  double at(std::size_t row, std::size_t col) const { return data_[row * shape_[1] + col]; }
  double& at(std::size_t row, std::size_t col) { return data_[row * shape_[1] + col]; }

  double scalar() const;

  bool AllFinite() const;

  // Rounds every element to the tensor's dtype (a no-op for kFloat64).
  void RoundToDType();

  // Returns a copy converted to `dtype`.
  Tensor Cast(DType dtype) const;

 private:
  Shape shape_;
  std::vector<double> data_ = std::vector<double>(1, 0.0);
  DType dtype_ = DType::kFloat64;
};

// Same shape, dtype, and identical bit patterns.
bool BitwiseEqual(const Tensor& a, const Tensor& b);

// 64-bit FNV-1a over the little-endian bytes of each element, in the tensor's
// dtype width.
std::uint64_t Fingerprint(const Tensor& t, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dpflow::engine

#endif  // DPFLOW_ENGINE_TENSOR_H_
