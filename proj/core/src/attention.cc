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
#include "asrlab/attention.h"

#include <cmath>

namespace asrlab {

void ValidateMask(const Mask& mask, std::size_t queries, std::size_t keys) {
  if (mask.empty()) return;
  if (mask.size() != queries * keys) {
    throw Error("attention: mask has " + std::to_string(mask.size()) +
                " entries, expected " + std::to_string(queries) + " x " +
                std::to_string(keys));
  }
  for (std::size_t q = 0; q < queries; ++q) {
    bool any = false;
    for (std::size_t k = 0; k < keys && !any; ++k) any = mask[q * keys + k] != 0;
    if (!any) {
      throw Error("attention: query " + std::to_string(q) + " has no allowed keys");
    }
  }
}

MultiHeadAttention::MultiHeadAttention(std::size_t model_dim, std::size_t heads,
                                       std::size_t head_dim, Rng& rng, bool zero_output)
    : heads_(heads), head_dim_(head_dim) {
  if (model_dim == 0 || heads == 0 || head_dim == 0) {
    throw Error("attention: dimensions must be positive");
  }
  w_query_ = GlorotParam(model_dim, heads * head_dim, rng);
  w_key_ = GlorotParam(model_dim, heads * head_dim, rng);
  w_value_ = GlorotParam(model_dim, heads * head_dim, rng);
  w_head_ = zero_output ? Tensor::Zeros({heads * head_dim, model_dim}, true)
                        : GlorotParam(heads * head_dim, model_dim, rng);
}

Tensor MultiHeadAttention::Forward(const Tensor& queries, const Tensor& keys,
                                   const Tensor& values, const Mask& mask,
                                   std::vector<Tensor>* weights) const {
  const std::size_t model = w_query_.rows();
  for (const Tensor* t : {&queries, &keys, &values}) {
    if (t->rank() != 2 || t->cols() != model) {
      throw Error("attention: input " + ShapeString(t->shape()) +
                  " does not match model dimension " + std::to_string(model));
    }
  }
  if (keys.rows() != values.rows()) {
    throw Error("attention: " + std::to_string(keys.rows()) + " keys but " +
                std::to_string(values.rows()) + " values");
  }
  ValidateMask(mask, queries.rows(), keys.rows());

  Tensor q = MatMul(queries, w_query_);
  Tensor k = MatMul(keys, w_key_);
  Tensor v = MatMul(values, w_value_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));
  std::vector<Tensor> heads;
  heads.reserve(heads_);
  if (weights) weights->clear();
  for (std::size_t h = 0; h < heads_; ++h) {
    const std::size_t b = h * head_dim_, e = b + head_dim_;
    Tensor scores = Scale(MatMulNT(SliceCols(q, b, e), SliceCols(k, b, e)), scale);
    Tensor attn = mask.empty() ? SoftmaxRows(scores) : SoftmaxRows(scores, mask);
    if (weights) weights->push_back(attn);
    heads.push_back(MatMul(attn, SliceCols(v, b, e)));
  }
  Tensor cat = heads_ == 1 ? heads[0] : ConcatCols(heads);
  return MatMul(cat, w_head_);
}

void MultiHeadAttention::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".w_query", w_query_});
  out.push_back({prefix + ".w_key", w_key_});
  out.push_back({prefix + ".w_value", w_value_});
  out.push_back({prefix + ".w_head", w_head_});
}

}  // namespace asrlab
