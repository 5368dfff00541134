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
// Encoder initialization for the transducer: frame-level cross-entropy or
// CTC pretraining of the acoustic encoder, the equal-segmentation alignment
// approximation, and parameter transfer.

#ifndef ASRLAB_PRETRAIN_H_
#define ASRLAB_PRETRAIN_H_

#include <span>
#include <string>
#include <vector>

#include "asrlab/encoder.h"
#include "asrlab/optim.h"
#include "asrlab/rnnt.h"

namespace asrlab {

// A word occupying frames [start, end) and spelled by `pieces`.
struct WordSegment {
  std::vector<int> pieces;
  std::size_t start = 0;
  std::size_t end = 0;
};

// Run lengths splitting `frames` into `pieces` near-equal parts; the
// remainder goes to the earliest parts.
std::vector<std::size_t> EqualSplit(std::size_t frames, std::size_t pieces);

// Per-frame labels over `frames` frames: each word's span is divided
// equally among its pieces; frames outside every span get `fill`. Spans
// must be ordered and non-overlapping; a span shorter than its piece count
// is an error ("span too short").
std::vector<int> EqualSegmentationAlignment(std::span<const WordSegment> words,
                                            std::size_t frames, int fill = 0);

enum class PretrainMode { kCrossEntropy, kCtc };

struct PretrainExample {
  Tensor features;              // frames x encoder input
  std::vector<int> tokens;      // transcript
  std::vector<int> alignment;   // label per frame; empty when unknown
};

struct PretrainConfig {
  PretrainMode mode = PretrainMode::kCrossEntropy;
  std::size_t steps = 100;
  std::size_t batch_size = 4;
  SgdConfig sgd;
  std::uint64_t seed = 1;
};

struct PretrainResult {
  // Frame classifier on top of the encoder (discarded at transfer).
  Linear head;
  // Mean loss per step (per frame for CE, per token for CTC).
  std::vector<double> losses;
};

// Trains `encoder` in place. CE mode needs an alignment on every example.
PretrainResult PretrainEncoder(LstmEncoder& encoder, std::size_t vocab,
                               std::span<const PretrainExample> data,
                               const PretrainConfig& config);

// Copies encoder parameters into `target`'s encoder. Names and shapes must
// match exactly; offenders are listed in the error.
void TransferEncoder(const LstmEncoder& source, RnntModel& target);

}  // namespace asrlab

#endif  // ASRLAB_PRETRAIN_H_
