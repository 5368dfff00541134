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
#include "asrlab/rnnt.h"

#include <cmath>

#include "asrlab/losses.h"
#include "asrlab/ops.h"

namespace asrlab {

void ValidateLabels(std::span<const int> labels, std::size_t vocab_size) {
  for (int y : labels) {
    if (y < kFirstLabel || static_cast<std::size_t>(y) >= vocab_size) {
      throw Error("label id " + std::to_string(y) + " is reserved or outside the vocabulary of " +
                  std::to_string(vocab_size));
    }
  }
}

RnntModel::RnntModel(const RnntConfig& config, Rng& rng) : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(kFirstLabel)) {
    throw Error("rnnt: vocabulary has no payload labels");
  }
  if (config.pred_blocks == 0) throw Error("rnnt: need at least one prediction block");
  encoder_ = LstmEncoder(config.encoder, rng);
  embedding_ = UniformParam({config.vocab_size, config.embed_dim}, 0.5, rng);
  std::size_t in = config.embed_dim;
  for (std::size_t b = 0; b < config.pred_blocks; ++b) {
    LstmBlockConfig bc;
    bc.input_dim = in;
    bc.cell_dim = config.pred_cell_dim;
    bc.proj_dim = config.pred_proj_dim;
    prediction_.emplace_back(bc, rng);
    in = config.pred_proj_dim;
  }
  const std::size_t j = config.joint_dim ? config.joint_dim : config.encoder.proj_dim;
  joint_encoder_ = Linear(config.encoder.proj_dim, j, rng, true);
  joint_prediction_ = Linear(config.pred_proj_dim, j, rng, false);
  joint_output_ = Linear(j, config.vocab_size, rng, true);
}

void RnntModel::CheckLabels(std::span<const int> labels) const {
  ValidateLabels(labels, config_.vocab_size);
}

Tensor RnntModel::Encode(const Tensor& x) const { return encoder_.Forward(x); }

Tensor RnntModel::Predict(std::span<const int> labels) const {
  CheckLabels(labels);
  std::vector<int> inputs{kSos};
  inputs.insert(inputs.end(), labels.begin(), labels.end());
  Tensor h = GatherRows(embedding_, inputs);
  for (const LstmBlock& b : prediction_) h = b.Forward(h);
  return h;
}

Tensor RnntModel::Joint(const Tensor& encoded, const Tensor& predicted) const {
  Tensor hidden = Tanh(OuterAdd(joint_encoder_.Forward(encoded),
                                joint_prediction_.Forward(predicted)));
  return LogSoftmaxRows(joint_output_.Forward(hidden));
}

Tensor RnntModel::Forward(const Tensor& x, std::span<const int> labels) const {
  if (x.cols() != config_.encoder.input_dim) {
    throw Error("rnnt: input dimension " + std::to_string(x.cols()) + " != " +
                std::to_string(config_.encoder.input_dim));
  }
  return Joint(Encode(x), Predict(labels));
}

Tensor RnntModel::Loss(const Tensor& x, std::span<const int> labels) const {
  return TransducerLoss(Forward(x, labels), x.rows(), labels);
}

PredictionState RnntModel::InitialPrediction() const {
  PredictionState s;
  for (const LstmBlock& b : prediction_) s.blocks.push_back(b.InitialState());
  return ExtendPrediction(s, kSos);
}

PredictionState RnntModel::ExtendPrediction(const PredictionState& state, int label) const {
  PredictionState next;
  const int id = label;
  Tensor h = GatherRows(embedding_, std::span<const int>(&id, 1));
  for (std::size_t b = 0; b < prediction_.size(); ++b) {
    auto [out, st] = prediction_[b].Step(h, state.blocks[b]);
    next.blocks.push_back(st);
    h = out;
  }
  next.output = h;
  return next;
}

Tensor RnntModel::ProjectEncoder(const Tensor& encoded) const {
  return joint_encoder_.Forward(encoded);
}

std::vector<double> RnntModel::JointStep(const Tensor& projected_encoder, std::size_t t,
                                         const PredictionState& state) const {
  Tensor hidden = Tanh(Add(SliceRows(projected_encoder, t, t + 1),
                           joint_prediction_.Forward(state.output)));
  Tensor lp = LogSoftmaxRows(joint_output_.Forward(hidden));
  return {lp.values().begin(), lp.values().end()};
}

void RnntModel::Collect(ParameterList& out) const {
  encoder_.Collect("encoder", out);
  out.push_back({"prediction.embedding", embedding_});
  for (std::size_t b = 0; b < prediction_.size(); ++b)
    prediction_[b].Collect("prediction.block" + std::to_string(b), out);
  joint_encoder_.Collect("joint.encoder", out);
  joint_prediction_.Collect("joint.prediction", out);
  joint_output_.Collect("joint.output", out);
}

ParameterList RnntModel::Parameters() const {
  ParameterList p;
  Collect(p);
  return p;
}

}  // namespace asrlab
