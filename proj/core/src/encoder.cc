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
#include "asrlab/encoder.h"

namespace asrlab {

LstmEncoder::LstmEncoder(const LstmEncoderConfig& config, Rng& rng) : config_(config) {
  if (config.blocks == 0) throw Error("lstm encoder: need at least one block");
  for (int tau : config.context_tau) {
    if (tau < 0) throw Error("lstm encoder: negative context tau");
  }
  std::size_t in = config.input_dim;
  for (std::size_t b = 0; b < config.blocks; ++b) {
    if (config.bidirectional) {
      bi_.emplace_back(in, config.cell_dim, config.proj_dim, rng);
    } else {
      LstmBlockConfig bc;
      bc.input_dim = in;
      bc.cell_dim = config.cell_dim;
      bc.proj_dim = config.proj_dim;
      bc.kind = config.kind;
      bc.context_tau = config.TauOf(b);
      uni_.emplace_back(bc, rng);
    }
    in = config.proj_dim;
  }
}

Tensor LstmEncoder::Forward(const Tensor& x) const {
  Tensor h = x;
  for (const LstmBlock& b : uni_) h = b.Forward(h);
  for (const BiLstmBlock& b : bi_) h = b.Forward(h, Contract::kFullUtterance);
  return h;
}

int LstmEncoder::lookahead_frames() const {
  int total = 0;
  for (const LstmBlock& b : uni_) total += b.lookahead();
  return total;
}

void LstmEncoder::Collect(const std::string& prefix, ParameterList& out) const {
  for (std::size_t b = 0; b < uni_.size(); ++b)
    uni_[b].Collect(prefix + ".block" + std::to_string(b), out);
  for (std::size_t b = 0; b < bi_.size(); ++b)
    bi_[b].Collect(prefix + ".block" + std::to_string(b), out);
}

}  // namespace asrlab
