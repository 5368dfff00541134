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
#include "asrlab/transformer_aed.h"

#include <algorithm>

#include "asrlab/ops.h"
#include "asrlab/rnnt.h"

namespace asrlab {

TransformerAedModel::TransformerAedModel(const TransformerAedConfig& config, Rng& rng)
    : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(kEos)) {
    throw Error("transformer aed: vocabulary has no payload labels");
  }
  if (config.encoder_blocks == 0 || config.decoder_blocks == 0) {
    throw Error("transformer aed: need at least one encoder and one decoder block");
  }
  if (config.mask == MaskKind::kChunk && config.chunk_frames == 0) {
    throw Error("transformer aed: chunk length must be >= 1");
  }
  for (int l : config.lookahead) {
    if (l < 0) throw Error("transformer aed: negative lookahead");
  }
  const std::size_t d = config.block.model_dim;
  VggConfig vc;
  vc.input_dim = config.input_dim;
  vc.channels1 = config.vgg_channels;
  vc.channels2 = config.vgg_channels;
  vc.output_dim = d;
  frontend_ = VggFrontend(vc, rng);
  for (std::size_t b = 0; b < config.encoder_blocks; ++b) encoder_.emplace_back(config.block, rng);
  encoder_norm_ = LayerNorm(d);
  ctc_head_ = Linear(d, config.vocab_size, rng, true);
  embedding_ = UniformParam({config.vocab_size, d}, 0.5, rng);
  token_conv_ = Linear(3 * d, d, rng, true);
  for (std::size_t b = 0; b < config.decoder_blocks; ++b) decoder_.emplace_back(config.block, rng);
  decoder_norm_ = LayerNorm(d);
  output_ = Linear(d, config.vocab_size, rng, true);
}

Tensor TransformerAedModel::Frontend(const Tensor& x) const {
  if (x.cols() != config_.input_dim) {
    throw Error("transformer aed: input dimension " + std::to_string(x.cols()) + " != " +
                std::to_string(config_.input_dim));
  }
  return frontend_.Forward(x);
}

AttentionMask TransformerAedModel::MaskFor(std::size_t frames) const {
  switch (config_.mask) {
    case MaskKind::kFull:
      return BuildFullMask(frames, config_.encoder_blocks);
    case MaskKind::kLookahead: {
      std::vector<int> per_block(config_.encoder_blocks);
      for (std::size_t b = 0; b < per_block.size(); ++b) per_block[b] = config_.LookaheadOf(b);
      return BuildLookaheadMask(frames, per_block);
    }
    case MaskKind::kChunk:
      return BuildChunkMask(frames, config_.encoder_blocks, config_.chunk_frames);
  }
  throw Error("transformer aed: unknown mask kind");
}

Tensor TransformerAedModel::RunBlocks(const Tensor& h, const AttentionMask& mask) const {
  if (mask.frames != h.rows() || mask.num_blocks() != encoder_.size()) {
    throw Error("transformer aed: mask for " + std::to_string(mask.frames) + " frames and " +
                std::to_string(mask.num_blocks()) + " blocks does not fit " +
                std::to_string(h.rows()) + " frames and " + std::to_string(encoder_.size()) +
                " blocks");
  }
  Tensor y = h;
  for (std::size_t b = 0; b < encoder_.size(); ++b) y = encoder_[b].Forward(y, mask.ForBlock(b));
  return encoder_norm_.Forward(y);
}

// Chunk k is computed over frames [0, end_k + tail) with the tail frames
// merged into chunk k, so its outputs see exactly tail frames past the chunk
// however many blocks are stacked.
Tensor TransformerAedModel::EncodeChunksWithTail(const Tensor& h) const {
  const std::size_t n = h.rows(), c = config_.chunk_frames, tail = config_.chunk_right_context;
  std::vector<Tensor> pieces;
  for (std::size_t begin = 0, k = 0; begin < n; begin += c, ++k) {
    const std::size_t end = std::min(n, begin + c);
    const std::size_t len = std::min(n, end + tail);
    Mask rel(len * len, 0);
    for (std::size_t q = 0; q < len; ++q) {
      const std::size_t cq = std::min(q / c, k);
      for (std::size_t key = 0; key < len; ++key)
        if (std::min(key / c, k) <= cq) rel[q * len + key] = 1;
    }
    AttentionMask m;
    m.kind = MaskKind::kChunk;
    m.frames = len;
    m.chunk_frames = c;
    m.blocks.assign(encoder_.size(), rel);
    pieces.push_back(SliceRows(RunBlocks(SliceRows(h, 0, len), m), begin, end));
  }
  return ConcatRows(pieces);
}

Tensor TransformerAedModel::Encode(const Tensor& x) const {
  Tensor h = Frontend(x);
  if (config_.mask == MaskKind::kChunk && config_.chunk_right_context > 0) {
    return EncodeChunksWithTail(h);
  }
  return RunBlocks(h, MaskFor(h.rows()));
}

Tensor TransformerAedModel::Encode(const Tensor& x, const AttentionMask& mask) const {
  return RunBlocks(Frontend(x), mask);
}

Tensor TransformerAedModel::CtcLogProbs(const Tensor& encoded) const {
  return LogSoftmaxRows(ctc_head_.Forward(encoded));
}

Tensor TransformerAedModel::DecoderLogProbs(const Tensor& encoded, std::span<const int> labels,
                                            std::size_t visible) const {
  ValidateLabels(labels, config_.vocab_size);
  std::vector<int> inputs{kSos};
  inputs.insert(inputs.end(), labels.begin(), labels.end());
  const std::size_t n = inputs.size();
  Tensor h = token_conv_.Forward(UnfoldTime(GatherRows(embedding_, inputs), -2, 0));
  const Mask self_mask = CausalMask(n);
  const Mask memory_mask = PrefixMask(n, encoded.rows(), visible);
  for (const TransformerDecoderBlock& b : decoder_) h = b.Forward(h, encoded, self_mask, memory_mask);
  return LogSoftmaxRows(output_.Forward(decoder_norm_.Forward(h)));
}

TransformerAedOutput TransformerAedModel::Forward(const Tensor& x,
                                                  std::span<const int> labels) const {
  Tensor enc = Encode(x);
  return {DecoderLogProbs(enc, labels, enc.rows()), CtcLogProbs(enc)};
}

TransformerAedOutput TransformerAedModel::Forward(const Tensor& x, std::span<const int> labels,
                                                  const AttentionMask& mask) const {
  Tensor enc = Encode(x, mask);
  return {DecoderLogProbs(enc, labels, enc.rows()), CtcLogProbs(enc)};
}

Tensor TransformerAedModel::Loss(const Tensor& x, std::span<const int> labels,
                                 const MultiTaskConfig& multitask) const {
  TransformerAedOutput out = Forward(x, labels);
  std::vector<int> targets(labels.begin(), labels.end());
  targets.push_back(kEos);
  Tensor att_ll = Sum(Pick(out.attention_log_probs, targets));
  Tensor ctc_ll = Scale(CtcLoss(out.ctc_log_probs, labels), -1.0);
  return MultiTaskLoss(ctc_ll, att_ll, multitask);
}

std::size_t TransformerAedModel::VisibleFrames(std::size_t t, std::size_t frames) const {
  if (frames == 0 || t >= frames) throw Error("transformer aed: trigger frame out of range");
  switch (config_.mask) {
    case MaskKind::kFull:
      return frames;
    case MaskKind::kLookahead:
      return std::min(frames, t + 1 + config_.decoder_window);
    case MaskKind::kChunk:
      return std::min(frames, (t / config_.chunk_frames + 1) * config_.chunk_frames);
  }
  return frames;
}

LatencySpec TransformerAedModel::Latency(const std::string& name) const {
  LatencySpec s;
  s.name = name;
  s.frontend_stride = static_cast<int>(VggFrontend::kStride);
  s.input_frame_shift_ms = 10;
  switch (config_.mask) {
    case MaskKind::kFull:
      s.kind = LatencyKind::kFullUtterance;
      break;
    case MaskKind::kLookahead:
      s.kind = LatencyKind::kLookahead;
      for (std::size_t b = 0; b < config_.encoder_blocks; ++b)
        s.per_block_lookahead.push_back(config_.LookaheadOf(b));
      s.decoder_window_frames = static_cast<int>(config_.decoder_window);
      break;
    case MaskKind::kChunk:
      s.kind = LatencyKind::kChunk;
      s.chunk_frames = static_cast<int>(config_.chunk_frames);
      s.chunk_right_context = static_cast<int>(config_.chunk_right_context);
      break;
  }
  return s;
}

void TransformerAedModel::Collect(ParameterList& out) const {
  frontend_.Collect("frontend", out);
  for (std::size_t b = 0; b < encoder_.size(); ++b)
    encoder_[b].Collect("encoder.block" + std::to_string(b), out);
  encoder_norm_.Collect("encoder.norm", out);
  ctc_head_.Collect("ctc_head", out);
  out.push_back({"decoder.embedding", embedding_});
  token_conv_.Collect("decoder.token_conv", out);
  for (std::size_t b = 0; b < decoder_.size(); ++b)
    decoder_[b].Collect("decoder.block" + std::to_string(b), out);
  decoder_norm_.Collect("decoder.norm", out);
  output_.Collect("decoder.output", out);
}

ParameterList TransformerAedModel::Parameters() const {
  ParameterList p;
  Collect(p);
  return p;
}

}  // namespace asrlab
