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
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "asrlab/checkpoint.h"
#include "asrlab/gradcheck.h"
#include "asrlab/losses.h"
#include "asrlab/mocha.h"
#include "asrlab/ops.h"
#include "asrlab/rnn_aed.h"
#include "asrlab/rnnt.h"
#include "asrlab/transformer_aed.h"
#include "test_util.h"

namespace asrlab {
namespace {

using testing::RandomMatrix;
using testing::TinyAedConfig;
using testing::TinyRnntConfig;
using testing::TinyTransformerConfig;

bool SameValues(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

std::vector<double> Row(const Tensor& t, std::size_t r) {
  auto v = t.values();
  return {v.begin() + r * t.cols(), v.begin() + (r + 1) * t.cols()};
}

// ---- RNN-T ----

TEST(RnntModel, EmptyTargetGivesOneColumnGrid) {
  Rng rng(1);
  RnntModel model(TinyRnntConfig(), rng);
  Tensor x = RandomMatrix(4, 3, rng);
  Tensor grid = model.Forward(x, {});
  EXPECT_EQ(grid.shape(), (Shape{4, 5}));
  for (std::size_t t = 0; t < 4; ++t) {
    double z = 0.0;
    for (double v : Row(grid, t)) z += std::exp(v);
    EXPECT_NEAR(z, 1.0, 1e-12);
  }
}

TEST(RnntModel, GridEntryIgnoresCurrentAndFutureLabels) {
  Rng rng(2);
  RnntModel model(TinyRnntConfig(), rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{3, 4, 3};
  Tensor base = model.Forward(x, y);
  for (std::size_t u = 0; u < y.size(); ++u) {
    std::vector<int> changed = y;
    for (std::size_t k = u; k < y.size(); ++k) changed[k] = changed[k] == 3 ? 4 : 3;
    Tensor other = model.Forward(x, changed);
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t v = 0; v <= u; ++v) {
        EXPECT_EQ(Row(base, t * 4 + v), Row(other, t * 4 + v)) << "t=" << t << " u=" << v;
      }
    }
  }
}

TEST(RnntModel, StreamingGridIsCausalUpToLookahead) {
  Rng rng(3);
  RnntConfig cfg = TinyRnntConfig();
  cfg.encoder.blocks = 2;
  cfg.encoder.context_tau = {1, 2};
  RnntModel model(cfg, rng);
  Tensor x = RandomMatrix(8, 3, rng);
  const std::vector<int> y{3};
  Tensor base = model.Forward(x, y);
  for (std::size_t p = 0; p < 8; ++p) {
    Tensor moved = x.Detach();
    for (std::size_t j = 0; j < 3; ++j) moved.mutable_values()[p * 3 + j] += 1.0;
    Tensor other = model.Forward(moved, y);
    for (std::size_t t = 0; t < 8; ++t) {
      const bool changed = Row(base, t * 2) != Row(other, t * 2);
      EXPECT_EQ(changed, p <= t + 3) << "t=" << t << " p=" << p;
    }
  }
}

TEST(RnntModel, RejectsBadInput) {
  Rng rng(4);
  RnntModel model(TinyRnntConfig(), rng);
  EXPECT_THROW(model.Forward(RandomMatrix(3, 2, rng), {}), Error);
  const std::vector<int> reserved{kEos};
  EXPECT_THROW(model.Forward(RandomMatrix(3, 3, rng), reserved), Error);
  const std::vector<int> too_big{5};
  EXPECT_THROW(model.Forward(RandomMatrix(3, 3, rng), too_big), Error);
}

TEST(RnntModel, GradientCheck) {
  Rng rng(5);
  RnntConfig cfg = TinyRnntConfig();
  cfg.encoder.context_tau = {1};
  RnntModel model(cfg, rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{3, 4};
  auto r = FiniteDifferenceCheck([&] { return model.Loss(x, y); },
                                 Tensors(model.Parameters()));
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(RnntModel, BidirectionalGradientCheck) {
  Rng rng(6);
  RnntConfig cfg = TinyRnntConfig();
  cfg.encoder.bidirectional = true;
  RnntModel model(cfg, rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{4, 3};
  auto r = FiniteDifferenceCheck([&] { return model.Loss(x, y); },
                                 Tensors(model.Parameters()));
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(RnntModel, IncrementalJointMatchesGrid) {
  Rng rng(7);
  RnntModel model(TinyRnntConfig(), rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{4, 3};
  Tensor grid = model.Forward(x, y);
  Tensor proj = model.ProjectEncoder(model.Encode(x));
  PredictionState s = model.InitialPrediction();
  for (std::size_t u = 0; u <= y.size(); ++u) {
    for (std::size_t t = 0; t < 3; ++t) {
      std::vector<double> a = model.JointStep(proj, t, s);
      std::vector<double> b = Row(grid, t * 3 + u);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
    if (u < y.size()) s = model.ExtendPrediction(s, y[u]);
  }
}

// ---- MoChA ----

TEST(Mocha, AllOnesSelectsFirstAllowedFrame) {
  Tensor p = Tensor::Filled({1, 5}, 1.0);
  Tensor prev = Tensor::Row({0.0, 0.0, 1.0, 0.0, 0.0});
  Tensor a = MonotonicAlignment(p, prev);
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            (std::vector<double>{0, 0, 1, 0, 0}));
  Tensor first = MonotonicAlignment(p, MochaInitialAlignment(5));
  EXPECT_EQ(first.values()[0], 1.0);
}

TEST(Mocha, AllZerosLosesEverything) {
  Tensor p = Tensor::Zeros({1, 4});
  MochaExpectation e =
      MochaExpectedAttention(p, MochaInitialAlignment(4), Tensor::Zeros({1, 4}), 2);
  for (double v : e.alpha.values()) EXPECT_EQ(v, 0.0);
  for (double v : e.beta.values()) EXPECT_EQ(v, 0.0);
}

TEST(Mocha, ExpectationMatchesPathSum) {
  // Direct sum over the boundary position of the stopping probability.
  Rng rng(8);
  const std::size_t n = 6, w = 3;
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> pv(n), prev(n), e(n);
  double mass = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    pv[t] = u(rng);
    prev[t] = u(rng);
    mass += prev[t];
    e[t] = 2.0 * u(rng) - 1.0;
  }
  for (double& v : prev) v /= mass;
  MochaExpectation ex = MochaExpectedAttention(Tensor::Row(pv), Tensor::Row(prev),
                                               Tensor::Row(e), w);
  for (std::size_t t = 0; t < n; ++t) {
    double want = 0.0;
    for (std::size_t k = 0; k <= t; ++k) {
      double survive = 1.0;
      for (std::size_t l = k; l < t; ++l) survive *= 1.0 - pv[l];
      want += prev[k] * survive * pv[t];
    }
    EXPECT_NEAR(ex.alpha.values()[t], want, 1e-14);
  }
  for (std::size_t k = 0; k < n; ++k) {
    double want = 0.0;
    for (std::size_t t = k; t < std::min(n, k + w); ++t) {
      double z = 0.0;
      for (std::size_t l = (t + 1 >= w ? t + 1 - w : 0); l <= t; ++l) z += std::exp(e[l]);
      want += ex.alpha.values()[t] * std::exp(e[k]) / z;
    }
    EXPECT_NEAR(ex.beta.values()[k], want, 1e-14);
  }
}

TEST(Mocha, GradientCheck) {
  Rng rng(9);
  Tensor logits = RandomMatrix(1, 5, rng, 1.0, true);
  Tensor prev_logits = RandomMatrix(1, 5, rng, 1.0, true);
  Tensor energies = RandomMatrix(1, 5, rng, 1.0, true);
  Tensor probe = RandomMatrix(1, 5, rng);
  auto f = [&] {
    MochaExpectation e = MochaExpectedAttention(Sigmoid(logits), SoftmaxRows(prev_logits),
                                                energies, 2);
    return Sum(Mul(Add(e.alpha, e.beta), probe));
  };
  EXPECT_LE(FiniteDifferenceCheck(f, {logits, prev_logits, energies}).max_relative_error,
            1e-4);
}

TEST(Mocha, HardAttendStopsAtFirstConfidentFrame) {
  const std::vector<double> p{0.1, 0.2, 1.0, 0.0, 0.9};
  const std::vector<double> e{0.0, 0.0, 0.0, 0.0, 0.0};
  HardMochaStep s = MochaHardAttend(p, e, 0, 2);
  ASSERT_TRUE(s.boundary.has_value());
  EXPECT_EQ(*s.boundary, 2u);
  EXPECT_EQ(s.weights, (std::vector<double>{0.0, 0.5, 0.5, 0.0, 0.0}));
  EXPECT_EQ(*MochaHardAttend(p, e, 3, 2).boundary, 4u);
  EXPECT_FALSE(MochaHardAttend(p, e, 5, 2).boundary.has_value());
}

// ---- RNN-AED ----

TEST(RnnAedModel, SingleFrameContextIsThatFrame) {
  Rng rng(10);
  RnnAedModel model(TinyAedConfig(AttentionKind::kLocation), rng);
  Tensor x = RandomMatrix(1, 3, rng);
  const std::vector<int> y{3, 4};
  RnnAedOutput out = model.Forward(x, y);
  ASSERT_EQ(out.attention.size(), 3u);
  for (const auto& w : out.attention) EXPECT_EQ(w, (std::vector<double>{1.0}));
}

TEST(RnnAedModel, SoftAttentionWeightsSumToOne) {
  Rng rng(11);
  RnnAedModel model(TinyAedConfig(AttentionKind::kLocation), rng);
  Tensor x = RandomMatrix(7, 3, rng);
  const std::vector<int> y{3, 4, 4};
  RnnAedOutput out = model.Forward(x, y);
  EXPECT_EQ(out.log_probs.shape(), (Shape{4, 5}));
  for (const auto& w : out.attention) {
    double s = 0.0;
    for (double v : w) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(RnnAedModel, LocationEnergiesDependOnPreviousAlignment) {
  Rng rng(12);
  RnnAedModel model(TinyAedConfig(AttentionKind::kLocation), rng);
  AedMemory mem = model.Prepare(model.Encode(RandomMatrix(6, 3, rng)));
  Tensor query = RandomMatrix(1, 3, rng);
  Tensor prev = SoftmaxRows(RandomMatrix(1, 6, rng));
  Tensor with = model.LocationEnergies(mem, query, prev);
  Tensor without = model.LocationEnergies(mem, query, Tensor::Zeros({1, 6}));
  EXPECT_FALSE(SameValues(with, without));
}

TEST(RnnAedModel, MochaWeightsAreSubStochasticAndMonotone) {
  Rng rng(13);
  RnnAedModel model(TinyAedConfig(AttentionKind::kMocha), rng);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor x = RandomMatrix(8, 3, rng, 2.0);
    const std::vector<int> y = testing::RandomLabels(4, 5, rng);
    RnnAedOutput out = model.Forward(x, y);
    ASSERT_EQ(out.boundary.size(), y.size() + 1);
    std::vector<double> prev_cdf(8, 1.0);  // initial alignment is all on frame 0
    for (std::size_t u = 0; u < out.boundary.size(); ++u) {
      double s = 0.0;
      for (double v : out.attention[u]) {
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_LE(s, 1.0 + 1e-12);
      // The boundary distribution only moves mass to later frames (or drops
      // it), so its CDF never rises above the previous one.
      double cdf = 0.0;
      for (std::size_t t = 0; t < 8; ++t) {
        cdf += out.boundary[u][t];
        EXPECT_LE(cdf, prev_cdf[t] + 1e-12);
        prev_cdf[t] = cdf;
      }
    }
  }
}

TEST(RnnAedModel, LocationGradientCheck) {
  Rng rng(14);
  RnnAedModel model(TinyAedConfig(AttentionKind::kLocation), rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{3, 4};
  auto r = FiniteDifferenceCheck([&] { return model.Loss(x, y); },
                                 Tensors(model.Parameters()));
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(RnnAedModel, MochaGradientCheck) {
  Rng rng(15);
  RnnAedConfig cfg = TinyAedConfig(AttentionKind::kMocha);
  cfg.encoder.context_tau = {1};
  RnnAedModel model(cfg, rng);
  Tensor x = RandomMatrix(3, 3, rng);
  const std::vector<int> y{4, 3};
  auto r = FiniteDifferenceCheck([&] { return model.Loss(x, y); },
                                 Tensors(model.Parameters()));
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(RnnAedModel, NoiseOnlyWhenRequested) {
  Rng rng(16);
  RnnAedModel model(TinyAedConfig(AttentionKind::kMocha), rng);
  Tensor x = RandomMatrix(5, 3, rng);
  const std::vector<int> y{3};
  const double clean = model.Loss(x, y).item();
  EXPECT_EQ(model.Loss(x, y).item(), clean);
  Rng noise(3);
  EXPECT_NE(model.Loss(x, y, &noise).item(), clean);
}

// ---- Transformer-AED ----

TEST(TransformerAedModel, LongChunkEqualsFullMaskBitExactly) {
  Rng rng(17);
  TransformerAedModel model(TinyTransformerConfig(MaskKind::kFull), rng);
  Tensor x = RandomMatrix(11, 3, rng);
  const std::vector<int> y{3, 4};
  const std::size_t frames = VggFrontend::OutputLength(11);
  TransformerAedOutput full = model.Forward(x, y, BuildFullMask(frames, 1));
  for (std::size_t c : {frames, frames + 3}) {
    TransformerAedOutput chunk = model.Forward(x, y, BuildChunkMask(frames, 1, c));
    EXPECT_TRUE(SameValues(full.ctc_log_probs, chunk.ctc_log_probs));
    EXPECT_TRUE(SameValues(full.attention_log_probs, chunk.attention_log_probs));
  }
}

TEST(TransformerAedModel, DecoderIsCausalOverTokens) {
  Rng rng(18);
  TransformerAedModel model(TinyTransformerConfig(MaskKind::kFull), rng);
  Tensor x = RandomMatrix(9, 3, rng);
  const std::vector<int> y{3, 4, 3};
  Tensor base = model.Forward(x, y).attention_log_probs;
  for (std::size_t u = 0; u < y.size(); ++u) {
    std::vector<int> changed = y;
    for (std::size_t k = u; k < y.size(); ++k) changed[k] = changed[k] == 3 ? 4 : 3;
    Tensor other = model.Forward(x, changed).attention_log_probs;
    for (std::size_t v = 0; v <= u; ++v) EXPECT_EQ(Row(base, v), Row(other, v));
  }
}

TEST(TransformerAedModel, HeadsShareTheEncoder) {
  Rng rng(19);
  TransformerAedModel model(TinyTransformerConfig(MaskKind::kFull), rng);
  ParameterList params = model.Parameters();
  std::size_t encoder = 0;
  for (const NamedTensor& p : params)
    if (p.name.rfind("encoder.", 0) == 0) ++encoder;
  EXPECT_GT(encoder, 0u);
  // Both losses reach encoder parameters.
  Tensor x = RandomMatrix(9, 3, rng);
  const std::vector<int> y{3};
  for (double alpha : {0.0, 1.0}) {
    ZeroGrads(params);
    Tape tape;
    tape.Backward(model.Loss(x, y, MultiTaskConfig{alpha}));
    double norm = 0.0;
    for (const NamedTensor& p : params)
      if (p.name.rfind("encoder.block0.ffn", 0) == 0)
        for (double g : p.tensor.grad()) norm += g * g;
    EXPECT_GT(norm, 0.0) << "alpha=" << alpha;
  }
}

TEST(TransformerAedModel, MultiTaskGradientCheck) {
  for (MaskKind kind : {MaskKind::kFull, MaskKind::kLookahead, MaskKind::kChunk}) {
    Rng rng(20);
    TransformerAedModel model(TinyTransformerConfig(kind), rng);
    Tensor x = RandomMatrix(9, 3, rng);
    const std::vector<int> y{3, 4};
    auto r = FiniteDifferenceCheck([&] { return model.Loss(x, y, MultiTaskConfig{0.3}); },
                                   Tensors(model.Parameters()));
    EXPECT_LE(r.max_relative_error, 1e-4) << static_cast<int>(kind);
  }
}

TEST(TransformerAedModel, ChunkTailExtendsVisibility) {
  Rng rng(21);
  TransformerAedConfig cfg = TinyTransformerConfig(MaskKind::kChunk);
  cfg.encoder_blocks = 2;
  cfg.chunk_frames = 2;
  cfg.chunk_right_context = 1;
  TransformerAedModel model(cfg, rng);
  Tensor x = RandomMatrix(24, 3, rng);  // 6 encoder frames
  Tensor base = model.Encode(x);
  for (std::size_t p = 0; p < 6; ++p) {
    Tensor moved = x.Detach();
    for (std::size_t r = 4 * p; r < 4 * p + 4; ++r)
      for (std::size_t j = 0; j < 3; ++j) moved.mutable_values()[r * 3 + j] += 1.0;
    Tensor other = model.Encode(moved);
    for (std::size_t t = 0; t < 6; ++t) {
      const std::size_t reach = (t / 2 + 1) * 2 + 1;  // chunk end plus tail
      EXPECT_EQ(Row(base, t) != Row(other, t), p < reach) << "t=" << t << " p=" << p;
    }
  }
}

// ---- Parameter counts and checkpoints ----

TEST(Models, ParameterCountsAreReported) {
  Rng rng(22);
  RnntConfig rc = TinyRnntConfig();
  RnntModel rnnt(rc, rng);
  // encoder: w_input 3x12, w_rec 3x12, bias 12, proj 3x3+3, norm 3+3
  const std::size_t encoder = 36 + 36 + 12 + 12 + 6;
  // prediction: embedding 5x2, w_input 2x12, w_rec 3x12, bias 12, proj 12, norm 6
  const std::size_t prediction = 10 + 24 + 36 + 12 + 12 + 6;
  // joint: 3x3+3, 3x3, 3x5+5
  const std::size_t joint = 12 + 9 + 20;
  EXPECT_EQ(CountParameters(rnnt.Parameters()), encoder + prediction + joint);
}

TEST(Checkpoint, RoundTripRestoresIdenticalModel) {
  Rng rng(23);
  TransformerAedModel a(TinyTransformerConfig(MaskKind::kChunk), rng);
  TransformerAedModel b(TinyTransformerConfig(MaskKind::kChunk), rng);
  std::stringstream ss;
  WriteCheckpoint(ss, "model=transformer_aed\n", a.Parameters());
  Checkpoint ck = ReadCheckpoint(ss);
  EXPECT_EQ(ck.config, "model=transformer_aed\n");
  RestoreParameters(b.Parameters(), ck.tensors);
  Tensor x = RandomMatrix(9, 3, rng);
  const std::vector<int> y{4};
  EXPECT_TRUE(SameValues(a.Forward(x, y).attention_log_probs,
                         b.Forward(x, y).attention_log_probs));
}

TEST(Checkpoint, RejectsMismatches) {
  Rng rng(24);
  RnntModel small(TinyRnntConfig(), rng);
  RnntConfig wide_cfg = TinyRnntConfig();
  wide_cfg.encoder.proj_dim = 4;
  RnntModel wide(wide_cfg, rng);
  try {
    RestoreParameters(wide.Parameters(), small.Parameters());
    FAIL() << "shape mismatch accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("encoder.block0.proj.weight"), std::string::npos);
  }
  ParameterList renamed = small.Parameters();
  renamed[0].name = "bogus";
  EXPECT_THROW(RestoreParameters(small.Parameters(), renamed), Error);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  std::stringstream bad("NOTACKPT");
  EXPECT_THROW(ReadCheckpoint(bad), Error);
  Rng rng(25);
  RnntModel m(TinyRnntConfig(), rng);
  std::stringstream ss;
  WriteCheckpoint(ss, "", m.Parameters());
  std::string bytes = ss.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(ReadCheckpoint(truncated), Error);
}

}  // namespace
}  // namespace asrlab
