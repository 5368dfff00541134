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
// Transformer attention encoder-decoder with a CTC head on the encoder.
//
// Encoder: VGG frontend (stride 4) then pre-LN self-attention blocks under a
// full, lookahead or chunk mask. Decoder: token embeddings passed through a
// causal width-3 convolution (the only source of order information), then
// pre-LN blocks with causal self-attention and cross-attention over the
// encoder output.

#ifndef ASRLAB_TRANSFORMER_AED_H_
#define ASRLAB_TRANSFORMER_AED_H_

#include <span>
#include <string>
#include <vector>

#include "asrlab/data.h"
#include "asrlab/losses.h"
#include "asrlab/streaming.h"
#include "asrlab/transformer.h"
#include "asrlab/vgg.h"

namespace asrlab {

struct TransformerAedConfig {
  std::size_t input_dim = 16;
  std::size_t vgg_channels = 16;
  TransformerConfig block;
  std::size_t encoder_blocks = 2;
  std::size_t decoder_blocks = 1;
  std::size_t vocab_size = 12;
  MaskKind mask = MaskKind::kFull;
  // Lookahead kind: future frames per encoder block (missing entries are 0).
  std::vector<int> lookahead;
  // Chunk kind: chunk length and the tail of frames past each chunk that
  // the chunk waits for.
  std::size_t chunk_frames = 4;
  std::size_t chunk_right_context = 0;
  // Encoder frames past a trigger the decoder may read (lookahead kind).
  std::size_t decoder_window = 0;

  int LookaheadOf(std::size_t block) const {
    return block < lookahead.size() ? lookahead[block] : 0;
  }
};

struct TransformerAedOutput {
  Tensor attention_log_probs;  // (U+1) x vocab
  Tensor ctc_log_probs;        // frames x vocab
};

class TransformerAedModel {
 public:
  TransformerAedModel() = default;
  TransformerAedModel(const TransformerAedConfig& config, Rng& rng);

  // Frontend output: ceil(T / 4) x model_dim.
  Tensor Frontend(const Tensor& x) const;
  // Encoder under the configured streaming mode (including chunk tails).
  Tensor Encode(const Tensor& x) const;
  // Encoder blocks under an explicit mask (no chunk tail handling).
  Tensor Encode(const Tensor& x, const AttentionMask& mask) const;
  // Configured mask for an encoder of `frames` frames.
  AttentionMask MaskFor(std::size_t frames) const;

  Tensor CtcLogProbs(const Tensor& encoded) const;
  // Decoder over inputs [sos, y_1..y_n] reading the first `visible`
  // encoder frames: (n+1) x vocab.
  Tensor DecoderLogProbs(const Tensor& encoded, std::span<const int> labels,
                         std::size_t visible) const;

  TransformerAedOutput Forward(const Tensor& x, std::span<const int> labels) const;
  TransformerAedOutput Forward(const Tensor& x, std::span<const int> labels,
                               const AttentionMask& mask) const;
  // -alpha log p_ctc - (1 - alpha) log p_att
  Tensor Loss(const Tensor& x, std::span<const int> labels,
              const MultiTaskConfig& multitask) const;

  // Encoder frames available to the decoder once frame t has been
  // triggered, out of `frames`.
  std::size_t VisibleFrames(std::size_t t, std::size_t frames) const;
  // Latency description for 10 ms input frames.
  LatencySpec Latency(const std::string& name) const;

  const TransformerAedConfig& config() const { return config_; }
  std::size_t vocab_size() const { return config_.vocab_size; }
  void Collect(ParameterList& out) const;
  ParameterList Parameters() const;

 private:
  Tensor RunBlocks(const Tensor& h, const AttentionMask& mask) const;
  Tensor EncodeChunksWithTail(const Tensor& h) const;

  TransformerAedConfig config_;
  VggFrontend frontend_;
  std::vector<TransformerBlock> encoder_;
  LayerNorm encoder_norm_;
  Linear ctc_head_;
  Tensor embedding_;
  Linear token_conv_;  // 3 * model_dim -> model_dim
  std::vector<TransformerDecoderBlock> decoder_;
  LayerNorm decoder_norm_;
  Linear output_;
};

}  // namespace asrlab

#endif  // ASRLAB_TRANSFORMER_AED_H_
