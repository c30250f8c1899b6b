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

#include "dpflow/engine/tensor.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "dpflow/error.h"

namespace dpflow::engine {

const char* DTypeName(DType dtype) {
  switch (dtype) {
    case DType::kFloat64:
      return "f64";
    case DType::kFloat32:
      return "f32";
  }
  return "?";
}

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    if (shape[i] == kDynamicDim) {
      os << '?';
    } else {
      os << shape[i];
    }
  }
  os << ']';
  return os.str();
}

bool IsFullyDefined(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == kDynamicDim) return false;
  }
  return true;
}

bool ShapeMatches(const Shape& declared, const Shape& runtime) {
  if (declared.size() != runtime.size()) return false;
  for (std::size_t i = 0; i < declared.size(); ++i) {
    if (declared[i] != kDynamicDim && declared[i] != runtime[i]) return false;
  }
  return true;
}

namespace {

std::size_t CheckedNumElements(const Shape& shape) {
  if (!IsFullyDefined(shape)) {
    throw ShapeError("tensor shape must be fully defined, got " + ShapeString(shape));
  }
  return NumElements(shape);
}

}  // namespace

Tensor::Tensor(Shape shape, DType dtype)
    : shape_(std::move(shape)), data_(CheckedNumElements(shape_), 0.0), dtype_(dtype) {}

Tensor::Tensor(Shape shape, std::vector<double> data, DType dtype)
    : shape_(std::move(shape)), data_(std::move(data)), dtype_(dtype) {
  if (data_.size() != CheckedNumElements(shape_)) {
    throw ShapeError("tensor data has " + std::to_string(data_.size()) +
                     " elements but shape " + ShapeString(shape_) + " needs " +
                     std::to_string(NumElements(shape_)));
  }
  RoundToDType();
}

Tensor Tensor::Scalar(double value, DType dtype) { return Tensor({}, {value}, dtype); }

double Tensor::scalar() const {
  if (data_.size() != 1) {
    throw ShapeError("scalar() on tensor of shape " + ShapeString(shape_));
  }
  return data_[0];
}

bool Tensor::AllFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::RoundToDType() {
  if (dtype_ != DType::kFloat32) return;
  for (double& v : data_) v = static_cast<double>(static_cast<float>(v));
}

Tensor Tensor::Cast(DType dtype) const {
  Tensor out = *this;
  out.dtype_ = dtype;
  out.RoundToDType();
  return out;
}

bool BitwiseEqual(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape() || a.dtype() != b.dtype()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

namespace {

inline std::uint64_t FnvByte(std::uint64_t h, std::uint8_t byte) {
  return (h ^ byte) * 0x100000001b3ULL;
}

}  // namespace

std::uint64_t Fingerprint(const Tensor& t, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (double v : t.data()) {
    if (t.dtype() == DType::kFloat32) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int i = 0; i < 4; ++i) h = FnvByte(h, static_cast<std::uint8_t>(bits >> (8 * i)));
    } else {
      auto bits = std::bit_cast<std::uint64_t>(v);
      for (int i = 0; i < 8; ++i) h = FnvByte(h, static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
  return h;
}

}  // namespace dpflow::engine
