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
#include "asrlab/rnn_aed.h"

#include <random>

#include "asrlab/mocha.h"
#include "asrlab/ops.h"
#include "asrlab/rnnt.h"

namespace asrlab {

namespace {

std::vector<double> RowValues(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

RnnAedModel::RnnAedModel(const RnnAedConfig& config, Rng& rng) : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(kEos)) {
    throw Error("rnn aed: vocabulary has no payload labels");
  }
  if (config.location_kernel % 2 == 0) throw Error("rnn aed: location kernel must be odd");
  if (config.mocha_window == 0) throw Error("rnn aed: MoChA window must be >= 1");
  encoder_ = LstmEncoder(config.encoder, rng);
  const std::size_t p = config.encoder.proj_dim, a = config.attention_dim;
  embedding_ = UniformParam({config.vocab_size, config.embed_dim}, 0.5, rng);
  LstmBlockConfig dc;
  dc.input_dim = p + config.embed_dim;
  dc.cell_dim = config.decoder_cell_dim;
  dc.proj_dim = config.decoder_proj_dim;
  decoder_ = LstmBlock(dc, rng);
  output_ = Linear(config.decoder_proj_dim + p, config.vocab_size, rng, true);
  key_ = Linear(p, a, rng, true);
  query_ = Linear(config.decoder_proj_dim, a, rng, false);
  v_ = GlorotParam(a, 1, rng);
  if (config.attention == AttentionKind::kLocation) {
    location_conv_ = GlorotParam(config.location_kernel, config.location_maps, rng);
    location_ = Linear(config.location_maps, a, rng, false);
  } else {
    selection_key_ = Linear(p, a, rng, true);
    selection_query_ = Linear(config.decoder_proj_dim, a, rng, false);
    selection_v_ = GlorotParam(a, 1, rng);
    selection_offset_ = Tensor::Scalar(config.mocha_energy_init, true);
  }
}

Tensor RnnAedModel::Encode(const Tensor& x) const {
  if (x.cols() != config_.encoder.input_dim) {
    throw Error("rnn aed: input dimension " + std::to_string(x.cols()) + " != " +
                std::to_string(config_.encoder.input_dim));
  }
  return encoder_.Forward(x);
}

AedMemory RnnAedModel::Prepare(const Tensor& encoded) const {
  AedMemory m;
  m.encoded = encoded;
  m.keys = key_.Forward(encoded);
  if (config_.attention == AttentionKind::kMocha) {
    m.selection_keys = selection_key_.Forward(encoded);
  }
  return m;
}

AedDecoderState RnnAedModel::InitialState(const AedMemory& memory) const {
  AedDecoderState s;
  s.lstm = decoder_.InitialState();
  s.query = Tensor::Zeros({1, config_.decoder_proj_dim});
  s.alignment = MochaInitialAlignment(memory.frames());
  return s;
}

Tensor RnnAedModel::Score(const Tensor& keys, const Tensor& query_part, const Tensor& extra,
                          const Tensor& v) const {
  Tensor pre = Add(keys, BroadcastRows(query_part, keys.rows()));
  if (extra.defined()) pre = Add(pre, extra);
  return Transpose(MatMul(Tanh(pre), v));
}

Tensor RnnAedModel::LocationEnergies(const AedMemory& memory, const Tensor& query,
                                     const Tensor& previous_alignment) const {
  if (config_.attention != AttentionKind::kLocation) {
    throw Error("rnn aed: location energies need location-aware attention");
  }
  const int half = static_cast<int>(config_.location_kernel / 2);
  Tensor features =
      MatMul(UnfoldTime(Transpose(previous_alignment), -half, half), location_conv_);
  return Score(memory.keys, query_.Forward(query), location_.Forward(features), v_);
}

Tensor RnnAedModel::SelectionProbabilities(const AedMemory& memory, const Tensor& query,
                                           Rng* noise) const {
  if (config_.attention != AttentionKind::kMocha) {
    throw Error("rnn aed: selection probabilities need MoChA");
  }
  Tensor e = Score(memory.selection_keys, selection_query_.Forward(query), Tensor(),
                   selection_v_);
  e = Add(e, MatMul(selection_offset_, Tensor::Filled({1, e.cols()}, 1.0)));
  if (noise != nullptr && config_.mocha_noise_std > 0.0) {
    std::normal_distribution<double> dist(0.0, config_.mocha_noise_std);
    std::vector<double> n(e.cols());
    for (double& v : n) v = dist(*noise);
    e = Add(e, Tensor::FromValues({1, e.cols()}, std::move(n)));
  }
  return Sigmoid(e);
}

Tensor RnnAedModel::ChunkEnergies(const AedMemory& memory, const Tensor& query) const {
  return Score(memory.keys, query_.Forward(query), Tensor(), v_);
}

AedStep RnnAedModel::Step(const AedMemory& memory, const AedDecoderState& state, int prev,
                          bool hard, Rng* noise) const {
  if (prev < 0 || static_cast<std::size_t>(prev) >= config_.vocab_size) {
    throw Error("rnn aed: token id " + std::to_string(prev) + " outside the vocabulary");
  }
  AedStep step;
  Tensor weights;
  Tensor next_alignment;
  std::size_t next_boundary = state.boundary;
  if (config_.attention == AttentionKind::kLocation) {
    weights = SoftmaxRows(LocationEnergies(memory, state.query, state.alignment));
    next_alignment = weights;
  } else if (!hard) {
    Tensor p = SelectionProbabilities(memory, state.query, noise);
    MochaExpectation ex = MochaExpectedAttention(p, state.alignment,
                                                 ChunkEnergies(memory, state.query),
                                                 config_.mocha_window);
    weights = ex.beta;
    next_alignment = ex.alpha;
    step.boundary = RowValues(ex.alpha);
  } else {
    Tensor p = SelectionProbabilities(memory, state.query, nullptr);
    Tensor e = ChunkEnergies(memory, state.query);
    HardMochaStep h = MochaHardAttend(p.values(), e.values(), state.boundary,
                                      config_.mocha_window);
    weights = Tensor::FromValues({1, memory.frames()}, h.weights);
    next_alignment = state.alignment;
    if (h.boundary) {
      step.hard_boundary = static_cast<int>(*h.boundary);
      next_boundary = *h.boundary;
    } else {
      next_boundary = memory.frames();
    }
  }
  Tensor context = MatMul(weights, memory.encoded);
  Tensor input = ConcatCols({context, GatherRows(embedding_, std::span<const int>(&prev, 1))});
  auto [out, lstm] = decoder_.Step(input, state.lstm);
  step.log_probs = LogSoftmaxRows(output_.Forward(ConcatCols({out, context})));
  step.weights = RowValues(weights);
  step.state.lstm = lstm;
  step.state.query = out;
  step.state.alignment = next_alignment;
  step.state.boundary = next_boundary;
  return step;
}

RnnAedOutput RnnAedModel::Forward(const Tensor& x, std::span<const int> labels,
                                  Rng* noise) const {
  ValidateLabels(labels, config_.vocab_size);
  AedMemory memory = Prepare(Encode(x));
  AedDecoderState state = InitialState(memory);
  RnnAedOutput out;
  std::vector<Tensor> rows;
  int prev = kSos;
  for (std::size_t u = 0; u <= labels.size(); ++u) {
    AedStep step = Step(memory, state, prev, false, noise);
    rows.push_back(step.log_probs);
    out.attention.push_back(std::move(step.weights));
    if (!step.boundary.empty()) out.boundary.push_back(std::move(step.boundary));
    state = step.state;
    if (u < labels.size()) prev = labels[u];
  }
  out.log_probs = ConcatRows(rows);
  return out;
}

Tensor RnnAedModel::Loss(const Tensor& x, std::span<const int> labels, Rng* noise) const {
  RnnAedOutput out = Forward(x, labels, noise);
  std::vector<int> targets(labels.begin(), labels.end());
  targets.push_back(kEos);
  return Scale(Sum(Pick(out.log_probs, targets)), -1.0);
}

void RnnAedModel::Collect(ParameterList& out) const {
  encoder_.Collect("encoder", out);
  out.push_back({"decoder.embedding", embedding_});
  decoder_.Collect("decoder.lstm", out);
  output_.Collect("decoder.output", out);
  key_.Collect("attention.key", out);
  query_.Collect("attention.query", out);
  out.push_back({"attention.v", v_});
  if (config_.attention == AttentionKind::kLocation) {
    out.push_back({"attention.location_conv", location_conv_});
    location_.Collect("attention.location", out);
  } else {
    selection_key_.Collect("attention.selection_key", out);
    selection_query_.Collect("attention.selection_query", out);
    out.push_back({"attention.selection_v", selection_v_});
    out.push_back({"attention.selection_offset", selection_offset_});
  }
}

ParameterList RnnAedModel::Parameters() const {
  ParameterList p;
  Collect(p);
  return p;
}

}  // namespace asrlab
