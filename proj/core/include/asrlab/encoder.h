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
// Stacked LSTM encoder shared by the RNN-T and RNN-AED models.

#ifndef ASRLAB_ENCODER_H_
#define ASRLAB_ENCODER_H_

#include <string>
#include <vector>

#include "asrlab/lstm.h"

namespace asrlab {

struct LstmEncoderConfig {
  std::size_t input_dim = 48;
  std::size_t blocks = 2;
  std::size_t cell_dim = 48;
  std::size_t proj_dim = 32;
  LstmKind kind = LstmKind::kStandard;
  bool bidirectional = false;
  // Context-layer lookahead per block (missing entries mean 0). Ignored for
  // bi-directional encoders.
  std::vector<int> context_tau;

  int TauOf(std::size_t block) const {
    return block < context_tau.size() ? context_tau[block] : 0;
  }
};

class LstmEncoder {
 public:
  LstmEncoder() = default;
  LstmEncoder(const LstmEncoderConfig& config, Rng& rng);

  // T x input_dim -> T x proj_dim.
  Tensor Forward(const Tensor& x) const;
  const LstmEncoderConfig& config() const { return config_; }
  bool streaming() const { return !config_.bidirectional; }
  // Future frames the output at t depends on (sum of context taus).
  int lookahead_frames() const;
  std::size_t output_dim() const { return config_.proj_dim; }
  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  LstmEncoderConfig config_;
  std::vector<LstmBlock> uni_;
  std::vector<BiLstmBlock> bi_;
};

}  // namespace asrlab

#endif  // ASRLAB_ENCODER_H_
