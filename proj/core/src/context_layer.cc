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
#include "asrlab/context_layer.h"

#include <algorithm>
#include <vector>

#include "asrlab/ops.h"

namespace asrlab {

ContextLayer::ContextLayer(int tau, std::size_t dim) : tau_(tau) {
  if (tau < 0) throw Error("context layer: negative lookahead");
  if (dim == 0) throw Error("context layer: zero feature dimension");
  const auto rows = static_cast<std::size_t>(tau + 1);
  // Starts close to the identity on the current frame; the future taps are
  // small but nonzero so every tap receives gradient from the first step.
  std::vector<double> w(rows * dim, 0.1);
  std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim), 1.0);
  weights_ = Tensor::FromValues({rows, dim}, std::move(w), true);
}

Tensor ContextLayer::Apply(const Tensor& g) const {
  if (g.cols() != dim()) {
    throw Error("context layer: input " + ShapeString(g.shape()) +
                " does not match dimension " + std::to_string(dim()));
  }
  const std::size_t frames = g.rows();
  Tensor out;
  for (int d = 0; d <= tau_; ++d) {
    Tensor q = BroadcastRows(SliceRows(weights_, d, d + 1), frames);
    Tensor term = Mul(d == 0 ? g : TimeShift(g, d), q);
    out = out.defined() ? Add(out, term) : term;
  }
  return out;
}

void ContextLayer::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".q", weights_});
}

}  // namespace asrlab
