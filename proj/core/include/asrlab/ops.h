// Copyright 2026 The asrlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differentiable primitives. Everything operates on rank-2 (rows x cols)
// tensors. The only implicit broadcast is AddBias (per-row bias); anything
// else needs an explicit BroadcastRows or Reshape.

#ifndef ASRLAB_OPS_H_
#define ASRLAB_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

// Row-major boolean relation; mask[r * cols + c] != 0 means "allowed".
using Mask = std::vector<std::uint8_t>;

Tensor MatMul(const Tensor& a, const Tensor& b);
// a * b^T
Tensor MatMulNT(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Div(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
// a (m x n) + bias (1 x n) on every row.
Tensor AddBias(const Tensor& a, const Tensor& bias);
// Replicates a 1 x n row into n_rows x n.
Tensor BroadcastRows(const Tensor& row, std::size_t n_rows);

Tensor Sigmoid(const Tensor& a);
Tensor Tanh(const Tensor& a);
Tensor Relu(const Tensor& a);
Tensor Exp(const Tensor& a);
Tensor Log(const Tensor& a);

// Row-wise softmax. With a mask, forbidden entries get exactly zero weight;
// a row with no allowed entry is an error.
Tensor SoftmaxRows(const Tensor& a);
Tensor SoftmaxRows(const Tensor& a, const Mask& mask);
Tensor LogSoftmaxRows(const Tensor& a);

Tensor ConcatCols(const std::vector<Tensor>& parts);
Tensor ConcatRows(const std::vector<Tensor>& parts);
Tensor SliceRows(const Tensor& a, std::size_t begin, std::size_t end);
Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end);
Tensor Reshape(const Tensor& a, Shape shape);

// Per-row normalization to zero mean / unit variance, then gain and bias
// (both 1 x n). Zero-variance rows map to zero before the affine terms.
Tensor LayerNormRows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                     double eps = 1e-5);

Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);

// Selects rows by index (embedding lookup).
Tensor GatherRows(const Tensor& table, std::span<const int> ids);
// out[i] = a[i, ids[i]] as an m x 1 column.
Tensor Pick(const Tensor& a, std::span<const int> ids);

// out[t] = a[t + offset] when in range, else zeros.
Tensor TimeShift(const Tensor& a, int offset);
// Concatenates TimeShift(a, k) for k = first..last along columns.
Tensor UnfoldTime(const Tensor& a, int first, int last);
// Max over non-overlapping windows of rows; the last window may be short.
Tensor MaxPoolRows(const Tensor& a, std::size_t window);
// a (m x k), b (n x k) -> (m*n) x k with row i*n+j = a[i] + b[j].
Tensor OuterAdd(const Tensor& a, const Tensor& b);

}  // namespace asrlab

#endif  // ASRLAB_OPS_H_
