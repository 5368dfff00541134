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
#include "asrlab/losses.h"

#include <cmath>
#include <limits>
#include <string>

#include "asrlab/ops.h"

namespace asrlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckLabels(const char* who, std::span<const int> target, std::size_t classes) {
  for (int y : target) {
    if (y <= kBlank || static_cast<std::size_t>(y) >= classes) {
      throw Error(std::string(who) + ": label " + std::to_string(y) +
                  " outside [1, " + std::to_string(classes) + ")");
    }
  }
}

}  // namespace

std::size_t CtcMinimumFrames(std::span<const int> target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) n += target[i] == target[i - 1];
  return n;
}

CtcLattice CtcForwardBackward(std::span<const double> log_probs, std::size_t frames,
                              std::size_t classes, std::span<const int> target) {
  if (frames == 0) throw Error("ctc: no frames");
  if (log_probs.size() != frames * classes) throw Error("ctc: log-prob size mismatch");
  CheckLabels("ctc", target, classes);
  if (CtcMinimumFrames(target) > frames) {
    throw Error("ctc: target unreachable: " + std::to_string(target.size()) +
                " labels need " + std::to_string(CtcMinimumFrames(target)) +
                " frames, got " + std::to_string(frames));
  }
  CtcLattice lat;
  lat.frames = frames;
  lat.expanded.push_back(kBlank);
  for (int y : target) {
    lat.expanded.push_back(y);
    lat.expanded.push_back(kBlank);
  }
  const std::size_t S = lat.expanded.size();
  auto lp = [&](std::size_t t, std::size_t s) {
    return log_probs[t * classes + lat.expanded[s]];
  };
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && lat.expanded[s] != kBlank && lat.expanded[s] != lat.expanded[s - 2];
  };

  lat.alpha.assign(frames * S, kNegInf);
  lat.alpha[0] = lp(0, 0);
  if (S > 1) lat.alpha[1] = lp(0, 1);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = lat.alpha[(t - 1) * S + s];
      if (s >= 1) a = LogAddExp(a, lat.alpha[(t - 1) * S + s - 1]);
      if (can_skip(s)) a = LogAddExp(a, lat.alpha[(t - 1) * S + s - 2]);
      lat.alpha[t * S + s] = a == kNegInf ? kNegInf : a + lp(t, s);
    }
  }
  const std::size_t last = (frames - 1) * S;
  lat.log_likelihood_alpha =
      S > 1 ? LogAddExp(lat.alpha[last + S - 1], lat.alpha[last + S - 2])
            : lat.alpha[last];

  // beta(t, s): log-prob of emitting frames t..T-1 given state s at frame t,
  // including frame t's own emission.
  lat.beta.assign(frames * S, kNegInf);
  lat.beta[last + S - 1] = lp(frames - 1, S - 1);
  if (S > 1) lat.beta[last + S - 2] = lp(frames - 1, S - 2);
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = lat.beta[(t + 1) * S + s];
      if (s + 1 < S) b = LogAddExp(b, lat.beta[(t + 1) * S + s + 1]);
      if (s + 2 < S && can_skip(s + 2)) b = LogAddExp(b, lat.beta[(t + 1) * S + s + 2]);
      lat.beta[t * S + s] = b == kNegInf ? kNegInf : b + lp(t, s);
    }
  }
  lat.log_likelihood_beta = S > 1 ? LogAddExp(lat.beta[0], lat.beta[1]) : lat.beta[0];
  return lat;
}

Tensor CtcLoss(const Tensor& log_probs, std::span<const int> target) {
  const std::size_t frames = log_probs.rows(), classes = log_probs.cols();
  CtcLattice lat = CtcForwardBackward(log_probs.values(), frames, classes, target);
  const double ll = lat.log_likelihood_alpha;
  if (!std::isfinite(ll)) throw Error("ctc: target has zero probability");
  const std::size_t S = lat.expanded.size();
  // d(-ll)/d lp(t, k) = -sum_{s: expanded[s] == k} exp(alpha + beta - lp - ll)
  std::vector<double> grad(frames * classes, 0.0);
  auto lpv = log_probs.values();
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double a = lat.alpha[t * S + s], b = lat.beta[t * S + s];
      if (a == kNegInf || b == kNegInf) continue;
      const std::size_t k = static_cast<std::size_t>(lat.expanded[s]);
      grad[t * classes + k] -= std::exp(a + b - lpv[t * classes + k] - ll);
    }
  }
  return MakeOp("ctc_loss", {1, 1}, {-ll}, {log_probs},
                [grad = std::move(grad)](detail::Node& n) {
                  detail::Node& in = *n.inputs[0];
                  if (!in.requires_grad) return;
                  auto& g = in.EnsureGrad();
                  for (std::size_t i = 0; i < grad.size(); ++i) g[i] += n.grad[0] * grad[i];
                });
}

TransducerLattice TransducerForwardBackward(std::span<const double> log_probs,
                                            std::size_t frames, std::size_t classes,
                                            std::span<const int> target) {
  if (frames == 0) throw Error("transducer: no frames");
  const std::size_t P = target.size() + 1;
  if (log_probs.size() != frames * P * classes) {
    throw Error("transducer: grid of " + std::to_string(log_probs.size()) +
                " values does not match " + std::to_string(frames) + " x " +
                std::to_string(P) + " x " + std::to_string(classes));
  }
  CheckLabels("transducer", target, classes);
  auto lp = [&](std::size_t t, std::size_t u, std::size_t k) {
    return log_probs[(t * P + u) * classes + k];
  };
  TransducerLattice lat;
  lat.frames = frames;
  lat.positions = P;
  // alpha(t, u): log-prob of reaching node (t, u) before emitting anything at it.
  lat.alpha.assign(frames * P, kNegInf);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u < P; ++u) {
      if (t == 0 && u == 0) {
        lat.alpha[0] = 0.0;
        continue;
      }
      double a = kNegInf;
      if (t > 0) a = lat.alpha[(t - 1) * P + u] + lp(t - 1, u, kBlank);
      if (u > 0) a = LogAddExp(a, lat.alpha[t * P + u - 1] + lp(t, u - 1, target[u - 1]));
      lat.alpha[t * P + u] = a;
    }
  }
  lat.log_likelihood_alpha = lat.alpha[frames * P - 1] + lp(frames - 1, P - 1, kBlank);

  // beta(t, u): log-prob of finishing from node (t, u).
  lat.beta.assign(frames * P, kNegInf);
  for (std::size_t t = frames; t-- > 0;) {
    for (std::size_t u = P; u-- > 0;) {
      if (t == frames - 1 && u == P - 1) {
        lat.beta[t * P + u] = lp(t, u, kBlank);
        continue;
      }
      double b = kNegInf;
      if (t + 1 < frames) b = lat.beta[(t + 1) * P + u] + lp(t, u, kBlank);
      if (u + 1 < P) b = LogAddExp(b, lat.beta[t * P + u + 1] + lp(t, u, target[u]));
      lat.beta[t * P + u] = b;
    }
  }
  lat.log_likelihood_beta = lat.beta[0];
  return lat;
}

Tensor TransducerLoss(const Tensor& grid, std::size_t frames, std::span<const int> target) {
  const std::size_t classes = grid.cols();
  const std::size_t P = target.size() + 1;
  if (grid.rows() != frames * P) {
    throw Error("transducer: grid " + ShapeString(grid.shape()) + " does not hold " +
                std::to_string(frames) + " x " + std::to_string(P) + " positions");
  }
  TransducerLattice lat = TransducerForwardBackward(grid.values(), frames, classes, target);
  const double ll = lat.log_likelihood_alpha;
  if (!std::isfinite(ll)) throw Error("transducer: target has zero probability");
  auto g = grid.values();
  std::vector<double> grad(grid.size(), 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u < P; ++u) {
      const double a = lat.alpha[t * P + u];
      const std::size_t row = (t * P + u) * classes;
      if (t + 1 < frames) {
        grad[row + kBlank] = -std::exp(a + g[row + kBlank] + lat.beta[(t + 1) * P + u] - ll);
      } else if (u + 1 == P) {
        grad[row + kBlank] = -std::exp(a + g[row + kBlank] - ll);
      }
      if (u + 1 < P) {
        const auto k = static_cast<std::size_t>(target[u]);
        grad[row + k] = -std::exp(a + g[row + k] + lat.beta[t * P + u + 1] - ll);
      }
    }
  }
  return MakeOp("transducer_loss", {1, 1}, {-ll}, {grid},
                [grad = std::move(grad)](detail::Node& n) {
                  detail::Node& in = *n.inputs[0];
                  if (!in.requires_grad) return;
                  auto& gi = in.EnsureGrad();
                  for (std::size_t i = 0; i < grad.size(); ++i) gi[i] += n.grad[0] * grad[i];
                });
}

double MultiTaskLoss(double ctc_log_likelihood, double att_log_likelihood,
                     const MultiTaskConfig& config) {
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw Error("multitask: alpha must lie in [0, 1]");
  }
  return -config.alpha * ctc_log_likelihood - (1.0 - config.alpha) * att_log_likelihood;
}

Tensor MultiTaskLoss(const Tensor& ctc_log_likelihood, const Tensor& att_log_likelihood,
                     const MultiTaskConfig& config) {
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw Error("multitask: alpha must lie in [0, 1]");
  }
  return Add(Scale(ctc_log_likelihood, -config.alpha),
             Scale(att_log_likelihood, -(1.0 - config.alpha)));
}

Tensor FrameCrossEntropy(const Tensor& logits, std::span<const int> alignment) {
  if (alignment.size() != logits.rows()) {
    throw Error("frame cross entropy: " + std::to_string(alignment.size()) +
                " alignment entries for " + std::to_string(logits.rows()) + " frames");
  }
  for (int k : alignment) {
    if (k < 0 || static_cast<std::size_t>(k) >= logits.cols()) {
      throw Error("frame cross entropy: target " + std::to_string(k) + " outside [0, " +
                  std::to_string(logits.cols()) + ")");
    }
  }
  return Scale(Mean(Pick(LogSoftmaxRows(logits), alignment)), -1.0);
}

}  // namespace asrlab
