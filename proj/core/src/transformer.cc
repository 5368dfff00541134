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
#include "asrlab/transformer.h"

namespace asrlab {

FeedForward::FeedForward(std::size_t model_dim, std::size_t hidden, Rng& rng,
                         bool zero_output)
    : inner(model_dim, hidden, rng), outer(hidden, model_dim, rng) {
  if (zero_output) outer.weight = Tensor::Zeros({hidden, model_dim}, true);
}

Tensor FeedForward::Forward(const Tensor& x) const {
  return outer.Forward(Relu(inner.Forward(x)));
}

void FeedForward::Collect(const std::string& prefix, ParameterList& out) const {
  inner.Collect(prefix + ".inner", out);
  outer.Collect(prefix + ".outer", out);
}

TransformerBlock::TransformerBlock(const TransformerConfig& config, Rng& rng)
    : norm_attention_(config.model_dim),
      self_attention_(config.model_dim, config.heads, config.head_dim, rng,
                      config.zero_output),
      norm_ffn_(config.model_dim),
      ffn_(config.model_dim, config.ffn_dim, rng, config.zero_output) {}

Tensor TransformerBlock::Forward(const Tensor& x, const Mask& mask,
                                 std::vector<Tensor>* attention) const {
  Tensor n = norm_attention_.Forward(x);
  Tensor y = Add(x, self_attention_.Forward(n, n, n, mask, attention));
  return Add(y, ffn_.Forward(norm_ffn_.Forward(y)));
}

void TransformerBlock::Collect(const std::string& prefix, ParameterList& out) const {
  norm_attention_.Collect(prefix + ".norm_attention", out);
  self_attention_.Collect(prefix + ".self_attention", out);
  norm_ffn_.Collect(prefix + ".norm_ffn", out);
  ffn_.Collect(prefix + ".ffn", out);
}

TransformerDecoderBlock::TransformerDecoderBlock(const TransformerConfig& config, Rng& rng)
    : norm_self_(config.model_dim),
      self_attention_(config.model_dim, config.heads, config.head_dim, rng,
                      config.zero_output),
      norm_cross_(config.model_dim),
      cross_attention_(config.model_dim, config.heads, config.head_dim, rng,
                       config.zero_output),
      norm_ffn_(config.model_dim),
      ffn_(config.model_dim, config.ffn_dim, rng, config.zero_output) {}

Tensor TransformerDecoderBlock::Forward(const Tensor& x, const Tensor& memory,
                                        const Mask& self_mask,
                                        const Mask& memory_mask) const {
  Tensor n = norm_self_.Forward(x);
  Tensor y = Add(x, self_attention_.Forward(n, n, n, self_mask));
  Tensor c = norm_cross_.Forward(y);
  y = Add(y, cross_attention_.Forward(c, memory, memory, memory_mask));
  return Add(y, ffn_.Forward(norm_ffn_.Forward(y)));
}

void TransformerDecoderBlock::Collect(const std::string& prefix, ParameterList& out) const {
  norm_self_.Collect(prefix + ".norm_self", out);
  self_attention_.Collect(prefix + ".self_attention", out);
  norm_cross_.Collect(prefix + ".norm_cross", out);
  cross_attention_.Collect(prefix + ".cross_attention", out);
  norm_ffn_.Collect(prefix + ".norm_ffn", out);
  ffn_.Collect(prefix + ".ffn", out);
}

}  // namespace asrlab
