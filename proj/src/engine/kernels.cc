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

#include "dpflow/engine/kernels.h"

#include <algorithm>
#include <cmath>

namespace dpflow::engine::kernels {

namespace {

Tensor Like(const Tensor& t, Shape shape) { return Tensor(std::move(shape), t.dtype()); }

Tensor Finish(Tensor t) {
  t.RoundToDType();
  return t;
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor c = Like(a, {m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C.data() + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = A[i * k + l];
      const double* brow = B.data() + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return Finish(std::move(c));
}

Tensor MatMulTransposeA(const Tensor& a, const Tensor& b) {
  // a: [k,m], b: [k,n] -> a^T b: [m,n]
  const std::size_t k = a.dim(0), m = a.dim(1), n = b.dim(1);
  Tensor c = Like(a, {m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = c.data();
  for (std::size_t l = 0; l < k; ++l) {
    const double* brow = B.data() + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = A[l * m + i];
      double* crow = C.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return Finish(std::move(c));
}

Tensor MatMulTransposeB(const Tensor& a, const Tensor& b) {
  // a: [m,k], b: [n,k] -> a b^T: [m,n]
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  Tensor c = Like(a, {m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = A.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = B.data() + j * k;
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
      C[i * n + j] = acc;
    }
  }
  return Finish(std::move(c));
}

Tensor AddBias(const Tensor& x, const Tensor& bias) {
  const std::size_t m = x.dim(0), n = x.dim(1);
  Tensor y = x;
  auto Y = y.data();
  auto b = bias.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) Y[i * n + j] += b[j];
  }
  return Finish(std::move(y));
}

Tensor Add(const Tensor& a, const Tensor& b) {
  Tensor c = a;
  auto C = c.data();
  auto B = b.data();
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
  return Finish(std::move(c));
}

Tensor ReLU(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor ReLUGrad(const Tensor& dy, const Tensor& x) {
  Tensor dx = dy;
  auto D = dx.data();
  auto X = x.data();
  for (std::size_t i = 0; i < D.size(); ++i) {
    if (!(X[i] > 0.0)) D[i] = 0.0;
  }
  return dx;
}

Tensor ColumnSum(const Tensor& x) {
  const std::size_t m = x.dim(0), n = x.dim(1);
  Tensor s = Like(x, {n});
  auto S = s.data();
  auto X = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) S[j] += X[i * n + j];
  }
  return Finish(std::move(s));
}

Tensor Scale(const Tensor& x, double c) {
  Tensor y = x;
  for (double& v : y.data()) v *= c;
  return Finish(std::move(y));
}

Tensor SumSquares(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v * v;
  return Tensor::Scalar(acc, x.dtype());
}

Tensor SumSquaresGrad(const Tensor& dl, const Tensor& x) {
  const double g = 2.0 * dl.scalar();
  Tensor dx = x;
  for (double& v : dx.data()) v *= g;
  return Finish(std::move(dx));
}

Tensor LogSoftmax(const Tensor& logits) {
  const std::size_t m = logits.dim(0), c = logits.dim(1);
  Tensor out = logits;
  auto O = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = O.data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < c; ++j) row[j] -= lse;
  }
  return out;
}

Tensor Softmax(const Tensor& logits) {
  const std::size_t m = logits.dim(0), c = logits.dim(1);
  Tensor out = logits;
  auto O = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = O.data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < c; ++j) row[j] /= sum;
  }
  return out;
}

Tensor SoftmaxCrossEntropy(const Tensor& logits, const Tensor& onehot) {
  const std::size_t m = logits.dim(0);
  if (m == 0) return Tensor::Scalar(0.0, logits.dtype());
  Tensor logp = LogSoftmax(logits);
  auto L = logp.data();
  auto Y = onehot.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) acc -= Y[i] * L[i];
  return Tensor::Scalar(acc / static_cast<double>(m), logits.dtype());
}

Tensor SoftmaxCrossEntropyGrad(const Tensor& dl, const Tensor& logits, const Tensor& onehot) {
  const std::size_t m = logits.dim(0);
  Tensor g = Softmax(logits);
  if (m == 0) return g;
  const double s = dl.scalar() / static_cast<double>(m);
  // d/dz of -sum(y log softmax(z)) is softmax(z) * sum(y) - y; for one-hot
  // rows sum(y) is 1.
  const std::size_t c = logits.dim(1);
  auto G = g.data();
  auto Y = onehot.data();
  for (std::size_t r = 0; r < m; ++r) {
    double mass = 0.0;
    for (std::size_t j = 0; j < c; ++j) mass += Y[r * c + j];
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t i = r * c + j;
      G[i] = (G[i] * mass - Y[i]) * s;
    }
  }
  return Finish(std::move(g));
}

Tensor SoftmaxCrossEntropyLabelGrad(const Tensor& dl, const Tensor& logits) {
  const std::size_t m = logits.dim(0);
  Tensor g = LogSoftmax(logits);
  if (m == 0) return g;
  const double s = -dl.scalar() / static_cast<double>(m);
  for (double& v : g.data()) v *= s;
  return Finish(std::move(g));
}

}  // namespace dpflow::engine::kernels
