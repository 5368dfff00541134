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
// Experiment configuration: a flat "key = value" text format. Lines starting
// with '#' and blank lines are ignored; unknown keys and malformed values are
// errors. Every key and its default is listed in docs/config.md.

#ifndef ASRLAB_CONFIG_H_
#define ASRLAB_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "asrlab/lstm.h"
#include "asrlab/optim.h"
#include "asrlab/rnn_aed.h"
#include "asrlab/streaming.h"
#include "asrlab/tensor.h"

namespace asrlab {

enum class ModelFamily { kRnnt, kRnnAed, kTransformerAed };
enum class InitMode { kRandom, kCtc, kCrossEntropy };
enum class DecodeMode { kAuto, kGreedy, kBeam, kJoint, kTriggered, kMochaHard, kAttention };

struct ExperimentConfig {
  std::string name = "experiment";
  ModelFamily model = ModelFamily::kRnnt;

  // LSTM encoders (RNN-T and RNN-AED).
  bool bidirectional = false;
  LstmKind lstm_kind = LstmKind::kStandard;
  std::size_t encoder_blocks = 2;
  std::size_t cell_dim = 48;
  std::size_t proj_dim = 32;
  // One value applies to every block; a list gives one value per block.
  std::vector<int> context_tau{0};

  // RNN-T prediction and joint networks.
  std::size_t embed_dim = 16;
  std::size_t pred_cell_dim = 32;
  std::size_t pred_proj_dim = 32;
  std::size_t joint_dim = 0;

  // RNN-AED decoder and attention.
  AttentionKind attention = AttentionKind::kLocation;
  std::size_t decoder_cell_dim = 48;
  std::size_t decoder_proj_dim = 32;
  std::size_t attention_dim = 32;
  std::size_t location_kernel = 15;
  std::size_t location_maps = 8;
  std::size_t mocha_window = 4;
  double mocha_noise_std = 1.0;
  double mocha_energy_init = -1.0;

  // Transformer-AED.
  std::size_t model_dim = 32;
  std::size_t heads = 4;
  std::size_t head_dim = 8;
  std::size_t ffn_dim = 64;
  std::size_t decoder_blocks = 1;
  std::size_t vgg_channels = 16;
  MaskKind mask = MaskKind::kFull;
  std::vector<int> lookahead{0};
  std::size_t chunk_frames = 4;
  std::size_t chunk_right_context = 0;
  std::size_t decoder_window = 0;
  double ctc_weight = 0.3;

  // Decoding.
  DecodeMode decoder = DecodeMode::kAuto;
  double beta1 = 0.3;
  std::size_t beam = 4;
  std::size_t top_k = 4;

  // Optimization.
  double learning_rate = 0.05;
  double momentum = 0.9;
  double clip_norm = 5.0;
  std::size_t batch_size = 4;
  std::size_t steps = 1000;
  InitMode init = InitMode::kRandom;
  std::size_t pretrain_steps = 200;

  // Data.
  std::size_t corpus_size = 200;
  std::uint64_t corpus_seed = 1;
  double noise = 0.1;
  // Frames stacked into one model frame; 0 picks 3 for LSTM models and 1
  // for the transformer (whose frontend strides by 4 itself).
  std::size_t stack = 0;

  std::uint64_t seed = 1;

  std::size_t EffectiveStack() const;
  // Per-block values expanded to the block count.
  std::vector<int> ContextTauPerBlock() const;
  std::vector<int> LookaheadPerBlock() const;
  void Validate() const;
};

ExperimentConfig ParseConfig(std::string_view text);
// Applies "key=value" overrides on top of an existing configuration.
void ApplyConfigLine(ExperimentConfig& config, std::string_view line);
ExperimentConfig LoadConfigFile(const std::string& path);
// Every key, one per line, in a fixed order; parses back to an equal config.
std::string SerializeConfig(const ExperimentConfig& config);
std::vector<std::string> ConfigKeys();

}  // namespace asrlab

#endif  // ASRLAB_CONFIG_H_
