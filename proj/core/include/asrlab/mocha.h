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
// Monotonic chunkwise attention in expectation (training) and hard form
// (inference).
//
// Selection probabilities p_t decide whether the decoder stops at frame t.
// The boundary distribution of step u follows the monotonic recursion
//   q_t = (1 - p_{t-1}) q_{t-1} + alpha_{u-1}[t],   alpha_u[t] = p_t q_t
// and the chunk weights spread each boundary over the w frames ending at it
// with a softmax of the chunk energies:
//   beta_u[k] = sum_{t=k}^{k+w-1} alpha_u[t] exp(e_k) / sum_{l=t-w+1}^{t} exp(e_l)
// Probability mass of paths that never stop is dropped, so the weights sum
// to at most 1.

#ifndef ASRLAB_MOCHA_H_
#define ASRLAB_MOCHA_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

// p and previous are 1 x T rows; returns alpha_u (1 x T).
Tensor MonotonicAlignment(const Tensor& p, const Tensor& previous);

// Spreads a boundary distribution over the lookback window (1 x T rows).
Tensor ChunkwiseExpectation(const Tensor& alpha, const Tensor& chunk_energies,
                            std::size_t window);

struct MochaExpectation {
  Tensor alpha;  // boundary distribution
  Tensor beta;   // attention weights over frames
};

MochaExpectation MochaExpectedAttention(const Tensor& p, const Tensor& previous,
                                        const Tensor& chunk_energies, std::size_t window);

// Initial boundary distribution: all mass on frame 0.
Tensor MochaInitialAlignment(std::size_t frames);

struct HardMochaStep {
  // First frame >= start with p >= 0.5; empty when nothing fires.
  std::optional<std::size_t> boundary;
  // Attention weights over all frames (zero outside the window, all zero
  // when nothing fires).
  std::vector<double> weights;
};

HardMochaStep MochaHardAttend(std::span<const double> p,
                              std::span<const double> chunk_energies, std::size_t start,
                              std::size_t window);

}  // namespace asrlab

#endif  // ASRLAB_MOCHA_H_
