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
#include "asrlab/params.h"

#include <cmath>

#include "asrlab/ops.h"

namespace asrlab {

std::size_t CountParameters(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

std::vector<Tensor> Tensors(const ParameterList& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

void ZeroGrads(const ParameterList& params) {
  for (const auto& p : params) {
    Tensor t = p.tensor;
    t.ZeroGrad();
  }
}

Tensor UniformParam(Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(ShapeSize(shape));
  for (double& x : v) x = dist(rng);
  return Tensor::FromValues(std::move(shape), std::move(v), true);
}

Tensor GlorotParam(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return UniformParam({rows, cols}, bound, rng);
}

Linear::Linear(std::size_t in, std::size_t out, Rng& rng, bool with_bias)
    : weight(GlorotParam(in, out, rng)) {
  if (with_bias) bias = Tensor::Zeros({1, out}, true);
}

Tensor Linear::Forward(const Tensor& x) const {
  Tensor y = MatMul(x, weight);
  return bias.defined() ? AddBias(y, bias) : y;
}

void Linear::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".weight", weight});
  if (bias.defined()) out.push_back({prefix + ".bias", bias});
}

LayerNorm::LayerNorm(std::size_t dim)
    : gain(Tensor::Filled({1, dim}, 1.0, true)), bias(Tensor::Zeros({1, dim}, true)) {}

Tensor LayerNorm::Forward(const Tensor& x) const { return LayerNormRows(x, gain, bias); }

void LayerNorm::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".gain", gain});
  out.push_back({prefix + ".bias", bias});
}

}  // namespace asrlab
