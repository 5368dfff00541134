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
// LSTM attention encoder-decoder.
//
// Step u (u = 0..U, the last step predicts the end of sequence) with
// decoder output s_{u-1} (zeros before the first step):
//   c_u = attend(s_{u-1}, H)
//   s_u = DecoderLSTM([c_u; emb(y_{u-1})])      y_0 = sos
//   log p(y_u | ...) = log_softmax(W [s_u; c_u] + b)
//
// Location-aware attention scores frame t with
//   v^T tanh(W_s s + W_h h_t + W_f (F * alpha_{u-1})_t + b)
// where F convolves the previous alignment over time. MoChA computes a
// selection probability and a chunk energy per frame from the same kind of
// additive scorer.

#ifndef ASRLAB_RNN_AED_H_
#define ASRLAB_RNN_AED_H_

#include <span>
#include <string>
#include <vector>

#include "asrlab/data.h"
#include "asrlab/encoder.h"

namespace asrlab {

enum class AttentionKind { kLocation, kMocha };

struct RnnAedConfig {
  LstmEncoderConfig encoder;
  std::size_t vocab_size = 12;
  std::size_t embed_dim = 16;
  std::size_t decoder_cell_dim = 48;
  std::size_t decoder_proj_dim = 32;
  std::size_t attention_dim = 32;
  AttentionKind attention = AttentionKind::kLocation;
  std::size_t location_kernel = 15;  // odd, centred on the frame
  std::size_t location_maps = 8;
  std::size_t mocha_window = 4;
  // Std of the Gaussian noise added to selection energies while training.
  double mocha_noise_std = 1.0;
  // Initial offset of the selection energies.
  double mocha_energy_init = -1.0;
};

// Encoder-side quantities computed once per utterance.
struct AedMemory {
  Tensor encoded;         // T x P
  Tensor keys;            // T x A (location or chunk scorer)
  Tensor selection_keys;  // T x A (MoChA selection scorer)
  std::size_t frames() const { return encoded.rows(); }
};

struct AedDecoderState {
  LstmState lstm;
  Tensor query;      // 1 x decoder_proj_dim
  Tensor alignment;  // 1 x T: previous soft weights or boundary distribution
  // Hard MoChA: frame the next boundary search starts from.
  std::size_t boundary = 0;
};

struct AedStep {
  Tensor log_probs;  // 1 x vocab
  AedDecoderState state;
  std::vector<double> weights;   // attention over frames
  std::vector<double> boundary;  // MoChA boundary distribution (soft) or empty
  // Hard MoChA: frame where the decoder stopped; -1 when nothing fired.
  int hard_boundary = -1;
};

struct RnnAedOutput {
  Tensor log_probs;  // (U+1) x vocab
  std::vector<std::vector<double>> attention;
  std::vector<std::vector<double>> boundary;
};

class RnnAedModel {
 public:
  RnnAedModel() = default;
  RnnAedModel(const RnnAedConfig& config, Rng& rng);

  Tensor Encode(const Tensor& x) const;
  AedMemory Prepare(const Tensor& encoded) const;
  AedDecoderState InitialState(const AedMemory& memory) const;
  // One decoder step consuming previous token `prev`. With `hard` MoChA
  // uses the thresholded boundary instead of the expectation. `noise`
  // perturbs the selection energies (training only).
  AedStep Step(const AedMemory& memory, const AedDecoderState& state, int prev,
               bool hard = false, Rng* noise = nullptr) const;

  // Teacher-forced U+1 steps.
  RnnAedOutput Forward(const Tensor& x, std::span<const int> labels,
                       Rng* noise = nullptr) const;
  // -sum_u log p(y_u), including the end-of-sequence step.
  Tensor Loss(const Tensor& x, std::span<const int> labels, Rng* noise = nullptr) const;

  // Location scorer energies (1 x T) for a query and previous alignment.
  Tensor LocationEnergies(const AedMemory& memory, const Tensor& query,
                          const Tensor& previous_alignment) const;
  // MoChA selection probabilities and chunk energies (1 x T each).
  Tensor SelectionProbabilities(const AedMemory& memory, const Tensor& query,
                                Rng* noise = nullptr) const;
  Tensor ChunkEnergies(const AedMemory& memory, const Tensor& query) const;

  const RnnAedConfig& config() const { return config_; }
  const LstmEncoder& encoder() const { return encoder_; }
  std::size_t vocab_size() const { return config_.vocab_size; }
  void Collect(ParameterList& out) const;
  ParameterList Parameters() const;

 private:
  Tensor Score(const Tensor& keys, const Tensor& query_part, const Tensor& extra,
               const Tensor& v) const;

  RnnAedConfig config_;
  LstmEncoder encoder_;
  Tensor embedding_;
  LstmBlock decoder_;
  Linear output_;
  // Location-aware or chunk scorer.
  Linear key_;          // P -> A, with bias
  Linear query_;        // decoder_proj -> A
  Tensor v_;            // A x 1
  Tensor location_conv_;  // kernel x maps
  Linear location_;       // maps -> A
  // MoChA selection scorer.
  Linear selection_key_;
  Linear selection_query_;
  Tensor selection_v_;
  Tensor selection_offset_;  // 1 x 1
};

}  // namespace asrlab

#endif  // ASRLAB_RNN_AED_H_
