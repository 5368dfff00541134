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
#include "asrlab/lstm.h"

#include <numeric>
#include <vector>

#include "asrlab/ops.h"

namespace asrlab {

namespace {

struct Gates {
  Tensor i, f, g, o;
};

Gates SplitGates(const Tensor& z, std::size_t c) {
  return {Sigmoid(SliceCols(z, 0, c)), Sigmoid(SliceCols(z, c, 2 * c)),
          Tanh(SliceCols(z, 2 * c, 3 * c)), Sigmoid(SliceCols(z, 3 * c, 4 * c))};
}

LstmState CellUpdate(const Gates& gates, const Tensor& c_prev) {
  Tensor c = Add(Mul(gates.f, c_prev), Mul(gates.i, gates.g));
  Tensor h = Mul(gates.o, Tanh(c));
  return {h, c};
}

Tensor ForgetBiasInit(std::size_t c) {
  std::vector<double> b(4 * c, 0.0);
  for (std::size_t j = c; j < 2 * c; ++j) b[j] = 1.0;
  return Tensor::FromValues({1, 4 * c}, std::move(b), true);
}

void CheckInput(const char* who, const Tensor& x, std::size_t dim) {
  if (x.rank() != 2 || x.cols() != dim) {
    throw Error(std::string(who) + ": input " + ShapeString(x.shape()) +
                " does not match input dimension " + std::to_string(dim));
  }
}

}  // namespace

Tensor ReverseRows(const Tensor& x) {
  std::vector<int> idx(x.rows());
  std::iota(idx.rbegin(), idx.rend(), 0);
  return GatherRows(x, idx);
}

LstmBlock::LstmBlock(const LstmBlockConfig& config, Rng& rng) : config_(config) {
  const std::size_t c = config.cell_dim, p = config.proj_dim;
  if (config.input_dim == 0 || c == 0 || p == 0) {
    throw Error("lstm block: dimensions must be positive");
  }
  w_input_ = GlorotParam(config.input_dim, 4 * c, rng);
  if (config.kind == LstmKind::kStandard) {
    w_recurrent_ = GlorotParam(c, 4 * c, rng);
    bias_ = ForgetBiasInit(c);
    projection_ = Linear(c, p, rng, true);
    output_norm_ = LayerNorm(p);
  } else {
    w_recurrent_ = GlorotParam(p, 4 * c, rng);
    gate_norm_ = LayerNorm(4 * c);
    gate_norm_.bias = ForgetBiasInit(c);
    projection_ = Linear(c, p, rng, false);
  }
  if (config.context_tau > 0) context_.emplace(config.context_tau, p);
}

LstmState LstmBlock::InitialState() const {
  const std::size_t rec =
      config_.kind == LstmKind::kStandard ? config_.cell_dim : config_.proj_dim;
  return {Tensor::Zeros({1, rec}), Tensor::Zeros({1, config_.cell_dim})};
}

LstmState LstmBlock::Recur(const Tensor& x_gates, const LstmState& state) const {
  const std::size_t c = config_.cell_dim;
  Tensor z = Add(x_gates, MatMul(state.h, w_recurrent_));
  if (config_.kind == LstmKind::kStandard) {
    return CellUpdate(SplitGates(z, c), state.c);
  }
  LstmState next = CellUpdate(SplitGates(gate_norm_.Forward(z), c), state.c);
  next.h = projection_.Forward(next.h);
  return next;
}

Tensor LstmBlock::Finish(const Tensor& projected) const {
  Tensor y = context_ ? context_->Apply(projected) : projected;
  return config_.kind == LstmKind::kStandard ? output_norm_.Forward(y) : y;
}

std::pair<Tensor, LstmState> LstmBlock::Step(const Tensor& x_t,
                                             const LstmState& state) const {
  CheckInput("lstm step", x_t, config_.input_dim);
  if (x_t.rows() != 1) throw Error("lstm step: expected a single frame");
  Tensor xg = MatMul(x_t, w_input_);
  if (bias_.defined()) xg = Add(xg, bias_);
  LstmState next = Recur(xg, state);
  Tensor out;
  if (config_.kind == LstmKind::kStandard) {
    out = projection_.Forward(next.h);
    if (!context_) out = output_norm_.Forward(out);
  } else {
    out = next.h;
  }
  return {out, next};
}

Tensor LstmBlock::Forward(const Tensor& x) const {
  CheckInput("lstm block", x, config_.input_dim);
  Tensor xg = MatMul(x, w_input_);
  if (bias_.defined()) xg = AddBias(xg, bias_);
  LstmState state = InitialState();
  std::vector<Tensor> outs;
  outs.reserve(x.rows());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    state = Recur(SliceRows(xg, t, t + 1), state);
    outs.push_back(state.h);
  }
  Tensor seq = ConcatRows(outs);
  if (config_.kind == LstmKind::kStandard) seq = projection_.Forward(seq);
  return Finish(seq);
}

void LstmBlock::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".w_input", w_input_});
  out.push_back({prefix + ".w_recurrent", w_recurrent_});
  if (config_.kind == LstmKind::kStandard) {
    out.push_back({prefix + ".bias", bias_});
    projection_.Collect(prefix + ".proj", out);
  } else {
    gate_norm_.Collect(prefix + ".gate_norm", out);
    projection_.Collect(prefix + ".proj", out);
  }
  if (context_) context_->Collect(prefix + ".context", out);
  if (config_.kind == LstmKind::kStandard) output_norm_.Collect(prefix + ".norm", out);
}

BiLstmBlock::BiLstmBlock(std::size_t input_dim, std::size_t cell_dim,
                         std::size_t proj_dim, Rng& rng)
    : cell_dim_(cell_dim) {
  for (Direction* d : {&forward_, &backward_}) {
    d->w_input = GlorotParam(input_dim, 4 * cell_dim, rng);
    d->w_recurrent = GlorotParam(cell_dim, 4 * cell_dim, rng);
    d->bias = ForgetBiasInit(cell_dim);
  }
  projection_ = Linear(2 * cell_dim, proj_dim, rng, true);
  norm_ = LayerNorm(proj_dim);
}

Tensor BiLstmBlock::Run(const Direction& dir, const Tensor& x) const {
  Tensor xg = AddBias(MatMul(x, dir.w_input), dir.bias);
  LstmState state{Tensor::Zeros({1, cell_dim_}), Tensor::Zeros({1, cell_dim_})};
  std::vector<Tensor> outs;
  outs.reserve(x.rows());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    Tensor z = Add(SliceRows(xg, t, t + 1), MatMul(state.h, dir.w_recurrent));
    state = CellUpdate(SplitGates(z, cell_dim_), state.c);
    outs.push_back(state.h);
  }
  return ConcatRows(outs);
}

Tensor BiLstmBlock::Forward(const Tensor& x, Contract contract) const {
  if (contract == Contract::kStreaming) {
    throw Error("bi-directional lstm: needs the full utterance, not a streaming contract");
  }
  CheckInput("bi-directional lstm", x, forward_.w_input.rows());
  Tensor fwd = Run(forward_, x);
  Tensor bwd = ReverseRows(Run(backward_, ReverseRows(x)));
  return norm_.Forward(projection_.Forward(ConcatCols({fwd, bwd})));
}

void BiLstmBlock::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".fwd.w_input", forward_.w_input});
  out.push_back({prefix + ".fwd.w_recurrent", forward_.w_recurrent});
  out.push_back({prefix + ".fwd.bias", forward_.bias});
  out.push_back({prefix + ".bwd.w_input", backward_.w_input});
  out.push_back({prefix + ".bwd.w_recurrent", backward_.w_recurrent});
  out.push_back({prefix + ".bwd.bias", backward_.bias});
  projection_.Collect(prefix + ".proj", out);
  norm_.Collect(prefix + ".norm", out);
}

}  // namespace asrlab
