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
#include "asrlab/mocha.h"

#include <algorithm>
#include <cmath>

#include "asrlab/ops.h"

namespace asrlab {

namespace {

void CheckRow(const char* who, const Tensor& a, std::size_t frames) {
  if (a.rank() != 2 || a.rows() != 1 || a.cols() != frames) {
    throw Error(std::string(who) + ": expected a 1 x " + std::to_string(frames) +
                " row, got " + ShapeString(a.shape()));
  }
}

// band[l][t] = 1 iff t - window < l <= t.
Tensor WindowBand(std::size_t frames, std::size_t window) {
  std::vector<double> v(frames * frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t first = t + 1 >= window ? t + 1 - window : 0;
    for (std::size_t l = first; l <= t; ++l) v[l * frames + t] = 1.0;
  }
  return Tensor::FromValues({frames, frames}, std::move(v));
}

}  // namespace

Tensor MonotonicAlignment(const Tensor& p, const Tensor& previous) {
  const std::size_t n = p.cols();
  CheckRow("monotonic alignment", p, n);
  CheckRow("monotonic alignment", previous, n);
  auto pv = p.values();
  auto av = previous.values();
  std::vector<double> q(n), alpha(n);
  for (std::size_t t = 0; t < n; ++t) {
    q[t] = (t ? (1.0 - pv[t - 1]) * q[t - 1] : 0.0) + av[t];
    alpha[t] = pv[t] * q[t];
  }
  return MakeOp("monotonic_alignment", {1, n}, std::move(alpha), {p, previous},
                [q = std::move(q)](detail::Node& node) {
                  const std::size_t n = q.size();
                  auto& pn = *node.inputs[0];
                  auto& an = *node.inputs[1];
                  std::vector<double> gq(n);
                  double carry = 0.0;  // gq_{t+1}
                  for (std::size_t t = n; t-- > 0;) {
                    const double pt = pn.value[t];
                    gq[t] = node.grad[t] * pt + carry * (1.0 - pt);
                    if (pn.requires_grad) pn.EnsureGrad()[t] += node.grad[t] * q[t] - carry * q[t];
                    carry = gq[t];
                  }
                  if (an.requires_grad) {
                    auto& g = an.EnsureGrad();
                    for (std::size_t t = 0; t < n; ++t) g[t] += gq[t];
                  }
                });
}

Tensor ChunkwiseExpectation(const Tensor& alpha, const Tensor& chunk_energies,
                            std::size_t window) {
  const std::size_t n = alpha.cols();
  CheckRow("chunkwise expectation", alpha, n);
  CheckRow("chunkwise expectation", chunk_energies, n);
  if (window == 0) throw Error("chunkwise expectation: window must be >= 1");
  auto ev = chunk_energies.values();
  const double top = *std::max_element(ev.begin(), ev.end());
  Tensor e = Exp(Sub(chunk_energies, Tensor::Filled({1, n}, top)));
  Tensor band = WindowBand(n, window);
  Tensor denom = MatMul(e, band);
  Tensor ratio = Div(alpha, denom);
  return Mul(e, MatMulNT(ratio, band));
}

MochaExpectation MochaExpectedAttention(const Tensor& p, const Tensor& previous,
                                        const Tensor& chunk_energies, std::size_t window) {
  MochaExpectation out;
  out.alpha = MonotonicAlignment(p, previous);
  out.beta = ChunkwiseExpectation(out.alpha, chunk_energies, window);
  return out;
}

Tensor MochaInitialAlignment(std::size_t frames) {
  if (frames == 0) throw Error("mocha: need at least one frame");
  std::vector<double> v(frames, 0.0);
  v[0] = 1.0;
  return Tensor::FromValues({1, frames}, std::move(v));
}

HardMochaStep MochaHardAttend(std::span<const double> p,
                              std::span<const double> chunk_energies, std::size_t start,
                              std::size_t window) {
  if (p.size() != chunk_energies.size()) throw Error("mocha: length mismatch");
  if (window == 0) throw Error("mocha: window must be >= 1");
  HardMochaStep step;
  step.weights.assign(p.size(), 0.0);
  for (std::size_t t = start; t < p.size(); ++t) {
    if (p[t] >= 0.5) {
      step.boundary = t;
      break;
    }
  }
  if (!step.boundary) return step;
  const std::size_t b = *step.boundary;
  const std::size_t first = b + 1 >= window ? b + 1 - window : 0;
  double top = chunk_energies[first];
  for (std::size_t k = first; k <= b; ++k) top = std::max(top, chunk_energies[k]);
  double z = 0.0;
  for (std::size_t k = first; k <= b; ++k) z += std::exp(chunk_energies[k] - top);
  for (std::size_t k = first; k <= b; ++k) step.weights[k] = std::exp(chunk_energies[k] - top) / z;
  return step;
}

}  // namespace asrlab
