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

#ifndef DPFLOW_ENGINE_KERNELS_H_
#define DPFLOW_ENGINE_KERNELS_H_

#include "dpflow/engine/tensor.h"

// Forward kernels for every OpKind. Inputs are assumed shape-checked.
namespace dpflow::engine::kernels {

Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor MatMulTransposeA(const Tensor& a, const Tensor& b);
Tensor MatMulTransposeB(const Tensor& a, const Tensor& b);
Tensor AddBias(const Tensor& x, const Tensor& bias);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor ReLU(const Tensor& x);
Tensor ReLUGrad(const Tensor& dy, const Tensor& x);
Tensor ColumnSum(const Tensor& x);
Tensor Scale(const Tensor& x, double c);
Tensor SumSquares(const Tensor& x);
Tensor SumSquaresGrad(const Tensor& dl, const Tensor& x);

// Row-wise softmax with max subtraction.
Tensor Softmax(const Tensor& logits);
Tensor LogSoftmax(const Tensor& logits);
Tensor SoftmaxCrossEntropy(const Tensor& logits, const Tensor& onehot);
Tensor SoftmaxCrossEntropyGrad(const Tensor& dl, const Tensor& logits, const Tensor& onehot);
Tensor SoftmaxCrossEntropyLabelGrad(const Tensor& dl, const Tensor& logits);

}  // namespace dpflow::engine::kernels

#endif  // DPFLOW_ENGINE_KERNELS_H_
