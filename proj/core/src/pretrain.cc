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
#include "asrlab/pretrain.h"

#include <algorithm>
#include <numeric>

#include "asrlab/checkpoint.h"
#include "asrlab/losses.h"
#include "asrlab/ops.h"

namespace asrlab {

std::vector<std::size_t> EqualSplit(std::size_t frames, std::size_t pieces) {
  if (pieces == 0) throw Error("equal segmentation: a word needs at least one piece");
  if (frames < pieces) {
    throw Error("equal segmentation: span too short (" + std::to_string(frames) +
                " frames for " + std::to_string(pieces) + " pieces)");
  }
  std::vector<std::size_t> runs(pieces, frames / pieces);
  for (std::size_t i = 0; i < frames % pieces; ++i) ++runs[i];
  return runs;
}

std::vector<int> EqualSegmentationAlignment(std::span<const WordSegment> words,
                                            std::size_t frames, int fill) {
  std::vector<int> out(frames, fill);
  std::size_t previous_end = 0;
  for (const WordSegment& w : words) {
    if (w.start < previous_end || w.end < w.start || w.end > frames) {
      throw Error("equal segmentation: spans must be ordered, non-overlapping and in range");
    }
    std::size_t t = w.start;
    const std::vector<std::size_t> runs = EqualSplit(w.end - w.start, w.pieces.size());
    for (std::size_t i = 0; i < runs.size(); ++i)
      for (std::size_t k = 0; k < runs[i]; ++k) out[t++] = w.pieces[i];
    previous_end = w.end;
  }
  return out;
}

PretrainResult PretrainEncoder(LstmEncoder& encoder, std::size_t vocab,
                               std::span<const PretrainExample> data,
                               const PretrainConfig& config) {
  if (data.empty()) throw Error("pretrain: no training data");
  if (config.batch_size == 0) throw Error("pretrain: batch size must be >= 1");
  if (config.mode == PretrainMode::kCrossEntropy) {
    for (const PretrainExample& ex : data) {
      if (ex.alignment.empty()) throw Error("pretrain: CE mode needs frame alignments");
      if (ex.alignment.size() != ex.features.rows()) {
        throw Error("pretrain: alignment length does not match the features");
      }
    }
  }
  Rng rng(config.seed);
  PretrainResult result;
  result.head = Linear(encoder.output_dim(), vocab, rng, true);
  ParameterList params;
  encoder.Collect("encoder", params);
  result.head.Collect("head", params);
  SgdMomentum opt(params, config.sgd);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  for (std::size_t step = 0; step < config.steps; ++step) {
    double total = 0.0;
    {
      for (std::size_t b = 0; b < config.batch_size; ++b) {
        Tape tape;
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        const PretrainExample& ex = data[order[cursor++]];
        Tensor logits = result.head.Forward(encoder.Forward(ex.features));
        Tensor loss;
        if (config.mode == PretrainMode::kCrossEntropy) {
          loss = FrameCrossEntropy(logits, ex.alignment);
        } else {
          loss = Scale(CtcLoss(LogSoftmaxRows(logits), ex.tokens),
                       1.0 / static_cast<double>(std::max<std::size_t>(1, ex.tokens.size())));
        }
        loss = Scale(loss, 1.0 / static_cast<double>(config.batch_size));
        total += loss.item();
        tape.Backward(loss);
      }
    }
    opt.Step();
    result.losses.push_back(total);
  }
  return result;
}

void TransferEncoder(const LstmEncoder& source, RnntModel& target) {
  ParameterList src, dst;
  source.Collect("encoder", src);
  target.encoder().Collect("encoder", dst);
  RestoreParameters(dst, src);
}

}  // namespace asrlab
