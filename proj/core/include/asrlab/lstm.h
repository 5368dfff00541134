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
// LSTM building blocks.
//
// Standard block: LSTM recurrence over the cell, then a linear projection,
// an optional context layer, and layer normalization.
//
// Custom block: layer normalization on the pre-activation gate sums and the
// projection inside the recurrence (the projected output is what feeds back),
// followed by an optional context layer.
//
// Gate order in every 4C-wide matrix is input, forget, candidate, output.

#ifndef ASRLAB_LSTM_H_
#define ASRLAB_LSTM_H_

#include <optional>
#include <string>
#include <utility>

#include "asrlab/context_layer.h"
#include "asrlab/params.h"

namespace asrlab {

enum class LstmKind { kStandard, kCustom };

// Whether a caller may look at the whole utterance.
enum class Contract { kStreaming, kFullUtterance };

struct LstmState {
  Tensor h;  // recurrent output fed back (cell dim, or projection dim for custom)
  Tensor c;  // memory cell
};

struct LstmBlockConfig {
  std::size_t input_dim = 0;
  std::size_t cell_dim = 0;
  std::size_t proj_dim = 0;
  LstmKind kind = LstmKind::kStandard;
  // Future frames seen by the context layer; 0 means no context layer.
  int context_tau = 0;
};

class LstmBlock {
 public:
  LstmBlock() = default;
  LstmBlock(const LstmBlockConfig& config, Rng& rng);

  LstmState InitialState() const;

  // One recurrence step on a 1 x input_dim row. The returned output is the
  // block output for that frame when the block has no context layer, and the
  // pre-context projection otherwise (the context layer needs future frames).
  std::pair<Tensor, LstmState> Step(const Tensor& x_t, const LstmState& state) const;

  // T x input_dim -> T x proj_dim.
  Tensor Forward(const Tensor& x) const;

  const LstmBlockConfig& config() const { return config_; }
  int lookahead() const { return config_.context_tau; }
  const std::optional<ContextLayer>& context() const { return context_; }
  std::optional<ContextLayer>& context() { return context_; }

  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  // Gate pre-activations for one step given the input contribution row.
  LstmState Recur(const Tensor& x_gates, const LstmState& state) const;
  Tensor Finish(const Tensor& projected) const;

  LstmBlockConfig config_;
  Tensor w_input_;      // input_dim x 4C
  Tensor w_recurrent_;  // C x 4C (standard) or P x 4C (custom)
  Tensor bias_;         // 1 x 4C, standard only
  LayerNorm gate_norm_;  // custom only, over the 4C gate sums
  Linear projection_;    // C -> P (bias only for standard)
  std::optional<ContextLayer> context_;
  LayerNorm output_norm_;  // standard only
};

// Bi-directional standard block: forward and backward recurrences,
// concatenated [forward, backward], projected, then layer-normalized.
class BiLstmBlock {
 public:
  BiLstmBlock() = default;
  BiLstmBlock(std::size_t input_dim, std::size_t cell_dim, std::size_t proj_dim,
              Rng& rng);

  // Needs the full utterance; Contract::kStreaming is rejected.
  Tensor Forward(const Tensor& x, Contract contract) const;

  void Collect(const std::string& prefix, ParameterList& out) const;

  // Exposed so tests can build the direction-swapped twin.
  struct Direction {
    Tensor w_input;
    Tensor w_recurrent;
    Tensor bias;
  };
  Direction& forward_direction() { return forward_; }
  Direction& backward_direction() { return backward_; }
  Linear& projection() { return projection_; }
  LayerNorm& norm() { return norm_; }
  std::size_t cell_dim() const { return cell_dim_; }

 private:
  Tensor Run(const Direction& dir, const Tensor& x) const;

  std::size_t cell_dim_ = 0;
  Direction forward_;
  Direction backward_;
  Linear projection_;
  LayerNorm norm_;
};

// Reverses the row order (differentiable).
Tensor ReverseRows(const Tensor& x);

}  // namespace asrlab

#endif  // ASRLAB_LSTM_H_
