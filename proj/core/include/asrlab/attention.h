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
#ifndef ASRLAB_ATTENTION_H_
#define ASRLAB_ATTENTION_H_

#include <string>
#include <vector>

#include "asrlab/ops.h"
#include "asrlab/params.h"

namespace asrlab {

// Scaled dot-product attention with several heads:
//   H_i = softmax(Q W_Qi (K W_Ki)^T / sqrt(d_k)) V W_Vi
//   out = [H_1 ... H_h] W_head
// No biases. The mask is queries x keys; an empty mask allows every pair.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(std::size_t model_dim, std::size_t heads, std::size_t head_dim,
                     Rng& rng, bool zero_output = false);

  // When `weights` is given it receives one queries x keys tensor per head.
  Tensor Forward(const Tensor& queries, const Tensor& keys, const Tensor& values,
                 const Mask& mask, std::vector<Tensor>* weights = nullptr) const;

  std::size_t heads() const { return heads_; }
  std::size_t head_dim() const { return head_dim_; }
  Tensor& w_query() { return w_query_; }
  Tensor& w_key() { return w_key_; }
  Tensor& w_value() { return w_value_; }
  Tensor& w_head() { return w_head_; }

  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  std::size_t heads_ = 0;
  std::size_t head_dim_ = 0;
  Tensor w_query_;  // model x heads*head_dim
  Tensor w_key_;
  Tensor w_value_;
  Tensor w_head_;  // heads*head_dim x model
};

// Checks that every query row of a mask has at least one allowed key.
void ValidateMask(const Mask& mask, std::size_t queries, std::size_t keys);

}  // namespace asrlab

#endif  // ASRLAB_ATTENTION_H_
