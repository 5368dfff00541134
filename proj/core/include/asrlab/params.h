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
// Named parameter bookkeeping and the two affine building blocks every layer
// uses.

#ifndef ASRLAB_PARAMS_H_
#define ASRLAB_PARAMS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

using Rng = std::mt19937_64;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

using ParameterList = std::vector<NamedTensor>;

std::size_t CountParameters(const ParameterList& params);
std::vector<Tensor> Tensors(const ParameterList& params);
void ZeroGrads(const ParameterList& params);

// Leaf with values drawn uniformly from [-bound, bound].
Tensor UniformParam(Shape shape, double bound, Rng& rng);
// Glorot-uniform rows x cols weight.
Tensor GlorotParam(std::size_t rows, std::size_t cols, Rng& rng);

// y = x W + b with W stored as in x out.
struct Linear {
  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng, bool with_bias = true);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;
  std::size_t in_dim() const { return weight.rows(); }
  std::size_t out_dim() const { return weight.cols(); }

  Tensor weight;
  Tensor bias;  // undefined when constructed without bias
};

struct LayerNorm {
  LayerNorm() = default;
  explicit LayerNorm(std::size_t dim);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  Tensor gain;
  Tensor bias;
};

}  // namespace asrlab

#endif  // ASRLAB_PARAMS_H_
