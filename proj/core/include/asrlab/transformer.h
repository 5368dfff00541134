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
#ifndef ASRLAB_TRANSFORMER_H_
#define ASRLAB_TRANSFORMER_H_

#include <string>

#include "asrlab/attention.h"

namespace asrlab {

struct TransformerConfig {
  std::size_t model_dim = 32;
  std::size_t heads = 4;
  std::size_t head_dim = 8;
  std::size_t ffn_dim = 64;
  // Zero-initialize the sublayer output projections so the block starts as
  // the identity map.
  bool zero_output = false;
};

// Position-wise feed-forward sublayer: relu(x W1 + b1) W2 + b2.
struct FeedForward {
  FeedForward() = default;
  FeedForward(std::size_t model_dim, std::size_t hidden, Rng& rng, bool zero_output);
  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  Linear inner;
  Linear outer;
};

// Pre-LN encoder block:
//   y = x + MHA(LN(x), LN(x), LN(x); mask)
//   z = y + FFN(LN(y))
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(const TransformerConfig& config, Rng& rng);

  Tensor Forward(const Tensor& x, const Mask& mask,
                 std::vector<Tensor>* attention = nullptr) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  MultiHeadAttention& self_attention() { return self_attention_; }

 private:
  LayerNorm norm_attention_;
  MultiHeadAttention self_attention_;
  LayerNorm norm_ffn_;
  FeedForward ffn_;
};

// Pre-LN decoder block with a third sublayer attending over the encoder
// output.
class TransformerDecoderBlock {
 public:
  TransformerDecoderBlock() = default;
  TransformerDecoderBlock(const TransformerConfig& config, Rng& rng);

  // self_mask: tokens x tokens; memory_mask: tokens x encoder frames.
  Tensor Forward(const Tensor& x, const Tensor& memory, const Mask& self_mask,
                 const Mask& memory_mask) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  LayerNorm norm_self_;
  MultiHeadAttention self_attention_;
  LayerNorm norm_cross_;
  MultiHeadAttention cross_attention_;
  LayerNorm norm_ffn_;
  FeedForward ffn_;
};

}  // namespace asrlab

#endif  // ASRLAB_TRANSFORMER_H_
