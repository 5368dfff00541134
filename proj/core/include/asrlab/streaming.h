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
// Streaming machinery: encoder self-attention masks, latency accounting and
// the perturbation probe that measures what an encoder actually looks at.

#ifndef ASRLAB_STREAMING_H_
#define ASRLAB_STREAMING_H_

#include <functional>
#include <string>
#include <vector>

#include "asrlab/ops.h"

namespace asrlab {

enum class MaskKind { kFull, kLookahead, kChunk };

// Per-block allow relation over encoder frames (queries x keys). Left
// context is unbounded for every kind.
struct AttentionMask {
  MaskKind kind = MaskKind::kFull;
  std::size_t frames = 0;
  // Lookahead kind: future frames visible to each block.
  std::vector<int> per_block_lookahead;
  // Chunk kind: fixed chunk length starting at frame 0.
  std::size_t chunk_frames = 0;
  std::vector<Mask> blocks;

  std::size_t num_blocks() const { return blocks.size(); }
  const Mask& ForBlock(std::size_t b) const { return blocks.at(b); }
  bool Allowed(std::size_t block, std::size_t query, std::size_t key) const {
    return blocks.at(block)[query * frames + key] != 0;
  }
  // Future frames frame t can reach through the whole stack.
  int FrameLookahead(std::size_t t) const;
};

AttentionMask BuildFullMask(std::size_t frames, std::size_t blocks);
// Same lookahead in every block; the stack sees blocks * per_block frames.
AttentionMask BuildLookaheadMask(std::size_t frames, std::size_t blocks, int per_block);
// Arbitrary per-block allocation, e.g. everything on the top block.
AttentionMask BuildLookaheadMask(std::size_t frames, std::vector<int> per_block);
// Keys allowed iff their chunk index is <= the query's.
AttentionMask BuildChunkMask(std::size_t frames, std::size_t blocks, std::size_t chunk_frames);

// Lower-triangular relation for label-synchronous decoder self-attention.
Mask CausalMask(std::size_t n);
// queries x keys relation allowing keys [0, visible) for every query.
Mask PrefixMask(std::size_t queries, std::size_t keys, std::size_t visible);

enum class LatencyKind { kFullUtterance, kLookahead, kChunk };

// Everything needed to turn an encoder configuration into milliseconds.
// Frame counts are in encoder frames; one encoder frame spans
// frontend_stride input frames of input_frame_shift_ms each.
struct LatencySpec {
  std::string name;
  LatencyKind kind = LatencyKind::kLookahead;
  std::vector<int> per_block_lookahead;
  int chunk_frames = 0;
  // Frames past the chunk end each chunk waits for (the chunk tail).
  int chunk_right_context = 0;
  int frontend_stride = 1;
  int input_frame_shift_ms = 10;
  // Extra encoder frames the decoder waits for beyond the encoder output.
  int decoder_window_frames = 0;

  int encoder_frame_ms() const { return frontend_stride * input_frame_shift_ms; }
  void Validate() const;
};

struct LatencyReport {
  bool full_utterance = false;
  // Worst-case future encoder frames a frame depends on.
  int lookahead_frames = 0;
  // Encoder-only latency: min/max over frames and the mean. For the chunk
  // kind the chunk is treated as a continuous interval, so a frame waits
  // between the tail and the tail plus the chunk length.
  long min_ms = 0;
  long max_ms = 0;
  double avg_ms = 0.0;
  long decoder_extra_ms = 0;
  // Encoder max plus decoder extra.
  long total_ms = 0;
};

LatencyReport EncoderLatencyMs(const LatencySpec& spec);

// Formats the latency table (architecture, frames, total/avg/range in ms) as
// tab-separated values with a header row.
std::string LatencyTableTsv(const std::vector<LatencySpec>& specs);

// The encoder configurations whose latencies are reported in the streaming
// comparison: 6 x 4 context frames on 30 ms superframes, the top-layer-only
// lookahead convolution, 18 x 1 lookahead transformer blocks on stride-4 10 ms
// frames with a 6-frame decoder window, and the chunked transformer.
std::vector<LatencySpec> ReferenceLatencySpecs();

// Maps encoder input (frames x dim) to encoder output (frames' x dim').
using SequenceFunction = std::function<Tensor(const Tensor&)>;

// True iff output frame t moves by more than 1e-9 after adding `delta` to
// every input row belonging to output frame perturb_at (input rows
// [perturb_at * stride, (perturb_at + 1) * stride)).
bool CausalityProbe(const SequenceFunction& encoder, const Tensor& x, std::size_t t,
                    std::size_t perturb_at, std::size_t input_stride = 1,
                    double delta = 1.0);

// For every output frame, the largest p - t (p >= t) whose perturbation
// changes frame t; 0 when no future frame matters.
std::vector<int> MeasureFutureDependence(const SequenceFunction& encoder, const Tensor& x,
                                         std::size_t input_stride = 1, double delta = 1.0);

}  // namespace asrlab

#endif  // ASRLAB_STREAMING_H_
