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
// Training objectives. Lattice arithmetic is carried out entirely in the log
// domain. The blank symbol is class 0. CTC and transducer losses are the
// per-utterance negative log-likelihood (summed, not averaged over frames).

#ifndef ASRLAB_LOSSES_H_
#define ASRLAB_LOSSES_H_

#include <span>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

inline constexpr int kBlank = 0;

// Forward/backward tables over the blank-interleaved label sequence.
struct CtcLattice {
  std::size_t frames = 0;
  std::vector<int> expanded;  // blank, y1, blank, y2, ..., blank
  std::vector<double> alpha;  // frames x expanded.size()
  std::vector<double> beta;
  double log_likelihood_alpha = 0.0;
  double log_likelihood_beta = 0.0;
};

// log_probs is frames x classes, row-major, already log-normalized.
CtcLattice CtcForwardBackward(std::span<const double> log_probs, std::size_t frames,
                              std::size_t classes, std::span<const int> target);

// Smallest frame count that can emit the target (repeats need a blank).
std::size_t CtcMinimumFrames(std::span<const int> target);

// -log p(target | x). The gradient flows to the log-probability tensor.
Tensor CtcLoss(const Tensor& log_probs, std::span<const int> target);

// Log-probabilities h_{t,u} for every (frame, label position) pair, stored
// as a (frames * (labels + 1)) x classes matrix with row t * (labels + 1) + u.
struct TransducerLattice {
  std::size_t frames = 0;
  std::size_t positions = 0;  // U + 1
  std::vector<double> alpha;  // frames x positions
  std::vector<double> beta;
  double log_likelihood_alpha = 0.0;
  double log_likelihood_beta = 0.0;
};

TransducerLattice TransducerForwardBackward(std::span<const double> log_probs,
                                            std::size_t frames, std::size_t classes,
                                            std::span<const int> target);

// -log of the total probability of all monotonic paths that use exactly
// `frames` blanks and the target labels in order. `grid` is the
// (frames * (U + 1)) x classes log-probability matrix described above.
Tensor TransducerLoss(const Tensor& grid, std::size_t frames, std::span<const int> target);

struct MultiTaskConfig {
  // Weight of the CTC term.
  double alpha = 0.3;
};

// L = -alpha * ctc_ll - (1 - alpha) * att_ll
double MultiTaskLoss(double ctc_log_likelihood, double att_log_likelihood,
                     const MultiTaskConfig& config);
Tensor MultiTaskLoss(const Tensor& ctc_log_likelihood, const Tensor& att_log_likelihood,
                     const MultiTaskConfig& config);

// Mean over frames of -log softmax(logits[t])[alignment[t]].
Tensor FrameCrossEntropy(const Tensor& logits, std::span<const int> alignment);

}  // namespace asrlab

#endif  // ASRLAB_LOSSES_H_
