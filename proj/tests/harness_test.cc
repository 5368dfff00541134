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
#include <filesystem>
#include <sstream>

#include "asrlab/checkpoint.h"
#include "asrlab/config.h"
#include "asrlab/harness.h"

namespace asrlab {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("asrlab_harness_" + name)).string();
}

// Small enough that a few optimizer steps take milliseconds.
ExperimentConfig Tiny(ModelFamily family) {
  ExperimentConfig c;
  c.model = family;
  c.encoder_blocks = 1;
  c.cell_dim = 6;
  c.proj_dim = 4;
  c.embed_dim = 3;
  c.pred_cell_dim = 4;
  c.pred_proj_dim = 4;
  c.decoder_cell_dim = 6;
  c.decoder_proj_dim = 4;
  c.attention_dim = 4;
  c.location_kernel = 3;
  c.location_maps = 2;
  c.model_dim = 8;
  c.heads = 2;
  c.head_dim = 4;
  c.ffn_dim = 8;
  c.vgg_channels = 2;
  c.corpus_size = 6;
  c.steps = 3;
  c.batch_size = 2;
  c.beam = 2;
  c.top_k = 2;
  return c;
}

std::vector<double> Flatten(const ParameterList& ps) {
  std::vector<double> out;
  for (const NamedTensor& p : ps) out.insert(out.end(), p.tensor.values().begin(), p.tensor.values().end());
  return out;
}

TEST(Config, SerializeParseRoundTrip) {
  ExperimentConfig c;
  c.name = "ctx";
  c.model = ModelFamily::kRnnAed;
  c.attention = AttentionKind::kMocha;
  c.context_tau = {1, 2};
  c.mocha_noise_std = 0.1 + 0.2;
  c.seed = 42;
  const std::string text = SerializeConfig(c);
  ExperimentConfig back = ParseConfig(text);
  EXPECT_EQ(SerializeConfig(back), text);
  EXPECT_EQ(back.context_tau, (std::vector<int>{1, 2}));
  EXPECT_EQ(back.mocha_noise_std, c.mocha_noise_std);
  EXPECT_EQ(back.model, ModelFamily::kRnnAed);
  // Every key is written.
  for (const std::string& k : ConfigKeys())
    EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
}

TEST(Config, CommentsAndBlankLines) {
  ExperimentConfig c = ParseConfig("# demo\n\nmodel = transformer_aed  # trailing\nmask = chunk\n");
  EXPECT_EQ(c.model, ModelFamily::kTransformerAed);
  EXPECT_EQ(c.mask, MaskKind::kChunk);
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  try {
    ParseConfig("modle = rnnt\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown key 'modle'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseConfig("model = cnn\n"), Error);
  EXPECT_THROW(ParseConfig("cell_dim = -3\n"), Error);
  EXPECT_THROW(ParseConfig("cell_dim = 0\n"), Error);
  EXPECT_THROW(ParseConfig("learning_rate = fast\n"), Error);
  EXPECT_THROW(ParseConfig("context_tau = 1,,2\n"), Error);
  EXPECT_THROW(ParseConfig("no equals sign\n"), Error);
  EXPECT_THROW(ParseConfig("location_kernel = 4\n"), Error);
}

TEST(Config, CrossFieldValidation) {
  EXPECT_THROW(ParseConfig("model = rnn_aed\ninit = ce\n"), Error);
  EXPECT_THROW(ParseConfig("encoder = bi\ninit = ctc\n"), Error);
  EXPECT_THROW(ParseConfig("model = rnnt\ndecoder = triggered\n"), Error);
  EXPECT_THROW(ParseConfig("model = transformer_aed\nmask = full\ndecoder = triggered\n"), Error);
  EXPECT_THROW(ParseConfig("model = rnn_aed\nattention = location\ndecoder = mocha_hard\n"), Error);
  EXPECT_THROW(ParseConfig("encoder_blocks = 3\ncontext_tau = 1,2\n"), Error);
  EXPECT_NO_THROW(ParseConfig("encoder_blocks = 3\ncontext_tau = 0,0,6\n"));
}

TEST(Config, PerBlockListsExpand) {
  ExperimentConfig c = ParseConfig("encoder_blocks = 6\ncontext_tau = 4\n");
  EXPECT_EQ(c.ContextTauPerBlock(), std::vector<int>(6, 4));
  EXPECT_EQ(c.EffectiveStack(), 3u);
  ExperimentConfig t = ParseConfig("model = transformer_aed\nencoder_blocks = 2\nlookahead = 0,3\n");
  EXPECT_EQ(t.LookaheadPerBlock(), (std::vector<int>{0, 3}));
  EXPECT_EQ(t.EffectiveStack(), 1u);
}

TEST(Config, LoadFileErrors) {
  EXPECT_THROW(LoadConfigFile(TempPath("missing.cfg")), Error);
}

TEST(LatencySpecFor, StreamingConfigurationsGive720ms) {
  ExperimentConfig context = ParseConfig("encoder_blocks = 6\ncontext_tau = 4\n");
  EXPECT_EQ(EncoderLatencyMs(LatencySpecFor(context)).max_ms, 720);
  ExperimentConfig top = ParseConfig("encoder_blocks = 6\ncontext_tau = 0,0,0,0,0,24\n");
  EXPECT_EQ(EncoderLatencyMs(LatencySpecFor(top)).max_ms, 720);
  ExperimentConfig look = ParseConfig(
      "model = transformer_aed\nencoder_blocks = 18\nmask = lookahead\nlookahead = 1\n"
      "decoder_window = 6\n");
  LatencyReport r = EncoderLatencyMs(LatencySpecFor(look));
  EXPECT_EQ(r.max_ms, 720);
  EXPECT_EQ(r.decoder_extra_ms, 240);
  ExperimentConfig chunk = ParseConfig(
      "model = transformer_aed\nmask = chunk\nchunk_frames = 12\nchunk_right_context = 12\n");
  LatencyReport rc = EncoderLatencyMs(LatencySpecFor(chunk));
  EXPECT_EQ(rc.min_ms, 480);
  EXPECT_EQ(rc.max_ms, 960);
  EXPECT_DOUBLE_EQ(rc.avg_ms, 720.0);
  EXPECT_TRUE(EncoderLatencyMs(LatencySpecFor(ParseConfig("encoder = bi\n"))).full_utterance);
}

TEST(AnyModel, AutoDecodeModes) {
  EXPECT_EQ(AnyModel(Tiny(ModelFamily::kRnnt)).ResolvedDecodeMode(), DecodeMode::kBeam);
  ExperimentConfig aed = Tiny(ModelFamily::kRnnAed);
  EXPECT_EQ(AnyModel(aed).ResolvedDecodeMode(), DecodeMode::kAttention);
  aed.attention = AttentionKind::kMocha;
  EXPECT_EQ(AnyModel(aed).ResolvedDecodeMode(), DecodeMode::kMochaHard);
  ExperimentConfig tr = Tiny(ModelFamily::kTransformerAed);
  EXPECT_EQ(AnyModel(tr).ResolvedDecodeMode(), DecodeMode::kJoint);
  tr.mask = MaskKind::kChunk;
  EXPECT_EQ(AnyModel(tr).ResolvedDecodeMode(), DecodeMode::kTriggered);
}

TEST(Train, ZeroStepsKeepsTheInitialization) {
  for (ModelFamily f : {ModelFamily::kRnnt, ModelFamily::kRnnAed, ModelFamily::kTransformerAed}) {
    ExperimentConfig c = Tiny(f);
    c.steps = 0;
    AnyModel fresh(c), trained(c);
    std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
    TrainResult r = Train(trained, data);
    EXPECT_TRUE(r.losses.empty());
    EXPECT_EQ(Flatten(trained.Parameters()), Flatten(fresh.Parameters()));
  }
}

TEST(Train, FixedSeedGivesIdenticalCurves) {
  for (ModelFamily f : {ModelFamily::kRnnt, ModelFamily::kRnnAed, ModelFamily::kTransformerAed}) {
    ExperimentConfig c = Tiny(f);
    if (f == ModelFamily::kRnnAed) c.attention = AttentionKind::kMocha;
    std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
    AnyModel a(c), b(c);
    std::vector<std::size_t> steps;
    TrainResult ra = Train(a, data, [&](std::size_t s, double) { steps.push_back(s); });
    TrainResult rb = Train(b, data);
    ASSERT_EQ(ra.losses.size(), 3u);
    EXPECT_EQ(ra.losses, rb.losses);
    EXPECT_EQ(steps, (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_EQ(Flatten(a.Parameters()), Flatten(b.Parameters()));
    c.seed = 2;
    AnyModel other(c);
    EXPECT_NE(Train(other, data).losses, ra.losses);
  }
}

TEST(Train, DivergenceReportsTheStep) {
  ExperimentConfig c = Tiny(ModelFamily::kRnnt);
  c.learning_rate = 1e150;
  c.clip_norm = 0.0;
  c.momentum = 0.0;
  c.steps = 20;
  std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
  AnyModel m(c);
  try {
    Train(m, data);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("diverged at step"), std::string::npos) << e.what();
  }
}

TEST(Train, PretrainTransferFineTunePipeline) {
  for (InitMode init : {InitMode::kCrossEntropy, InitMode::kCtc}) {
    ExperimentConfig c = Tiny(ModelFamily::kRnnt);
    c.init = init;
    c.pretrain_steps = 4;
    std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
    AnyModel m(c);
    TrainResult r = Train(m, data);
    EXPECT_EQ(r.pretrain_losses.size(), 4u);
    EXPECT_EQ(r.losses.size(), 3u);
    for (double l : r.losses) EXPECT_TRUE(std::isfinite(l));
    // The encoder no longer matches a random initialization.
    AnyModel fresh(c);
    EXPECT_NE(Flatten(m.Parameters()), Flatten(fresh.Parameters()));
  }
}

TEST(Train, LossCurveTsv) {
  std::vector<double> losses = {2.5, 1.25};
  EXPECT_EQ(LossCurveTsv(losses), "step\tloss\n1\t2.5\n2\t1.25\n");
}

TEST(Evaluate, EmptyCorpusIsAnError) {
  AnyModel m(Tiny(ModelFamily::kRnnt));
  EXPECT_THROW(Evaluate(m, std::vector<Example>{}), Error);
}

TEST(Evaluate, RepeatedEvaluationIsIdentical) {
  for (ModelFamily f : {ModelFamily::kRnnt, ModelFamily::kRnnAed, ModelFamily::kTransformerAed}) {
    ExperimentConfig c = Tiny(f);
    std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
    AnyModel m(c);
    Train(m, data);
    EvalResult a = Evaluate(m, data), b = Evaluate(m, data);
    EXPECT_EQ(EvalTsv(a), EvalTsv(b));
    EXPECT_EQ(a.utterances.size(), data.size());
    EXPECT_GE(a.token_accuracy(), 0.0);
    EXPECT_LE(a.token_accuracy(), 1.0);
  }
}

TEST(Evaluate, TsvShapes) {
  ExperimentConfig c = Tiny(ModelFamily::kTransformerAed);
  c.mask = MaskKind::kChunk;
  std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
  AnyModel m(c);
  EvalResult r = Evaluate(m, data);
  std::istringstream in(EvalTsv(r));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 9) << line;
    ++rows;
  }
  EXPECT_EQ(rows, data.size() + 1);
  std::string summary = EvalSummaryTsv(r);
  EXPECT_EQ(summary.substr(0, summary.find('\t')), "utterances");
  EXPECT_EQ(FramesString({}), "-");
  EXPECT_EQ(FramesString({1, 4, 4}), "1,4,4");
}

TEST(Checkpoint, ReloadReproducesTheModel) {
  for (ModelFamily f : {ModelFamily::kRnnt, ModelFamily::kRnnAed, ModelFamily::kTransformerAed}) {
    ExperimentConfig c = Tiny(f);
    std::vector<Example> data = PrepareExamples(MakeCorpus(c), c.EffectiveStack());
    AnyModel m(c);
    Train(m, data);
    const std::string path = TempPath("model.ckpt");
    SaveModel(path, m);
    AnyModel back = LoadModel(path);
    std::filesystem::remove(path);
    EXPECT_EQ(SerializeConfig(back.config()), SerializeConfig(m.config()));
    EXPECT_EQ(Flatten(back.Parameters()), Flatten(m.Parameters()));
    EXPECT_EQ(EvalTsv(Evaluate(back, data)), EvalTsv(Evaluate(m, data)));
  }
}

TEST(Checkpoint, IncompatibleArchitectureIsAnError) {
  ExperimentConfig c = Tiny(ModelFamily::kRnnt);
  AnyModel m(c);
  const std::string path = TempPath("mismatch.ckpt");
  SaveModel(path, m);
  const Checkpoint ck = LoadCheckpoint(path);
  std::filesystem::remove(path);
  c.cell_dim += 2;
  AnyModel wider(c);
  EXPECT_THROW(RestoreParameters(wider.Parameters(), ck.tensors), Error);
}

TEST(Compare, TableIsWellFormed) {
  ExperimentConfig stream = Tiny(ModelFamily::kRnnt);
  stream.name = "context";
  stream.encoder_blocks = 6;
  stream.context_tau = {4};
  stream.steps = 1;
  ExperimentConfig full = Tiny(ModelFamily::kTransformerAed);
  full.name = "full";
  full.steps = 1;
  std::vector<ExperimentConfig> configs = {stream, full};
  std::vector<std::uint64_t> seeds = {1, 2};
  std::vector<std::string> log;
  std::vector<CompareRow> rows =
      Compare(configs, seeds, [&](const std::string& s) { log.push_back(s); });
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].seeds, 2u);
  EXPECT_EQ(rows[0].latency.max_ms, 720);
  EXPECT_TRUE(rows[1].latency.full_utterance);
  EXPECT_GE(rows[0].wer_std, 0.0);
  EXPECT_FALSE(log.empty());

  std::istringstream in(CompareTsv(rows));
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header.substr(0, 6), "model\t");
  const auto tabs = std::count(header.begin(), header.end(), '\t');
  EXPECT_EQ(std::count(first.begin(), first.end(), '\t'), tabs);
  EXPECT_EQ(std::count(second.begin(), second.end(), '\t'), tabs);
  EXPECT_NE(first.find("\t720\t"), std::string::npos) << first;
  EXPECT_NE(second.find("\tfull\t"), std::string::npos) << second;
}

TEST(Compare, NeedsASeed) {
  std::vector<ExperimentConfig> configs = {Tiny(ModelFamily::kRnnt)};
  EXPECT_THROW(Compare(configs, std::vector<std::uint64_t>{}), Error);
}

}  // namespace
}  // namespace asrlab
