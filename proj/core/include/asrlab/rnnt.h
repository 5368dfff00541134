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
// RNN transducer: acoustic encoder, label-only prediction network and a
// one-hidden-layer joint network.
//
//   h_enc = Encoder(x)                 T x P
//   h_pre = Prediction([sos, y_1..y_U])  (U+1) x P
//   z[t,u] = log_softmax(W_o tanh(W_e h_enc[t] + W_p h_pre[u] + b) + b_o)

#ifndef ASRLAB_RNNT_H_
#define ASRLAB_RNNT_H_

#include <span>
#include <string>
#include <vector>

#include "asrlab/data.h"
#include "asrlab/encoder.h"

namespace asrlab {

struct RnntConfig {
  LstmEncoderConfig encoder;
  std::size_t vocab_size = 12;
  std::size_t embed_dim = 16;
  std::size_t pred_blocks = 1;
  std::size_t pred_cell_dim = 32;
  std::size_t pred_proj_dim = 32;
  // Joint hidden width; 0 means the encoder projection size.
  std::size_t joint_dim = 0;
};

// Prediction-network state after consuming some label prefix.
struct PredictionState {
  std::vector<LstmState> blocks;
  Tensor output;  // 1 x pred_proj_dim, h_pre for the next joint query
};

class RnntModel {
 public:
  RnntModel() = default;
  RnntModel(const RnntConfig& config, Rng& rng);

  Tensor Encode(const Tensor& x) const;
  // (U+1) x pred_proj_dim for inputs [sos, y_1, ..., y_U].
  Tensor Predict(std::span<const int> labels) const;
  // Joint log-probabilities for every (t, u): (T * (U+1)) x vocab, row
  // t * (U+1) + u.
  Tensor Joint(const Tensor& encoded, const Tensor& predicted) const;
  // Grid for a whole utterance.
  Tensor Forward(const Tensor& x, std::span<const int> labels) const;
  // -log p(y | x), summed over the utterance.
  Tensor Loss(const Tensor& x, std::span<const int> labels) const;

  // Incremental pieces used by the decoders.
  PredictionState InitialPrediction() const;
  PredictionState ExtendPrediction(const PredictionState& state, int label) const;
  // Encoder half of the joint for all frames: T x joint_dim.
  Tensor ProjectEncoder(const Tensor& encoded) const;
  // Joint log-probabilities (vocab values) for one (frame, prefix) pair.
  std::vector<double> JointStep(const Tensor& projected_encoder, std::size_t t,
                                const PredictionState& state) const;

  const RnntConfig& config() const { return config_; }
  const LstmEncoder& encoder() const { return encoder_; }
  LstmEncoder& encoder() { return encoder_; }
  std::size_t vocab_size() const { return config_.vocab_size; }
  void Collect(ParameterList& out) const;
  ParameterList Parameters() const;

 private:
  void CheckLabels(std::span<const int> labels) const;

  RnntConfig config_;
  LstmEncoder encoder_;
  Tensor embedding_;  // vocab x embed
  std::vector<LstmBlock> prediction_;
  Linear joint_encoder_;
  Linear joint_prediction_;
  Linear joint_output_;
};

// Throws unless every id is a payload label below vocab_size.
void ValidateLabels(std::span<const int> labels, std::size_t vocab_size);

}  // namespace asrlab

#endif  // ASRLAB_RNNT_H_
