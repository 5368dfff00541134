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
#include "asrlab/optim.h"

#include <cmath>

namespace asrlab {

void SgdConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error("sgd: learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error("sgd: momentum must lie in [0, 1)");
  if (!(clip_norm >= 0.0)) throw Error("sgd: clip norm must be non-negative");
}

SgdMomentum::SgdMomentum(ParameterList params, const SgdConfig& config)
    : params_(std::move(params)), config_(config) {
  config.Validate();
  for (const NamedTensor& p : params_) velocity_.emplace_back(p.tensor.size(), 0.0);
}

double SgdMomentum::Step() {
  double sq = 0.0;
  for (const NamedTensor& p : params_)
    for (double g : p.tensor.grad()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw Error("sgd: non-finite gradient norm");
  const double scale =
      config_.clip_norm > 0.0 && norm > config_.clip_norm ? config_.clip_norm / norm : 1.0;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor t = params_[k].tensor;
    auto g = t.grad();
    if (g.empty()) continue;
    auto w = t.mutable_values();
    auto& v = velocity_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = config_.momentum * v[i] + scale * g[i];
      w[i] -= config_.learning_rate * v[i];
    }
    t.ZeroGrad();
  }
  return norm;
}

}  // namespace asrlab
