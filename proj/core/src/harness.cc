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

#include "asrlab/harness.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numeric>
#include <sstream>

#include "asrlab/checkpoint.h"
#include "asrlab/ops.h"
#include "asrlab/optim.h"
#include "asrlab/pretrain.h"

namespace asrlab {

namespace {

// Independent streams derived from the experiment seed.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kNoiseStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kPretrainStream = 0x94d049bb133111ebULL;

LstmEncoderConfig EncoderConfigFor(const ExperimentConfig& c, std::size_t input_dim) {
  LstmEncoderConfig e;
  e.input_dim = input_dim;
  e.blocks = c.encoder_blocks;
  e.cell_dim = c.cell_dim;
  e.proj_dim = c.proj_dim;
  e.kind = c.lstm_kind;
  e.bidirectional = c.bidirectional;
  if (!c.bidirectional) e.context_tau = c.ContextTauPerBlock();
  return e;
}

std::size_t InputDim(const ExperimentConfig& c) {
  return TaskSpecFor(c).feature_dim * c.EffectiveStack();
}

std::size_t VocabSize(const ExperimentConfig& c) {
  return Tokenizer(TaskSpecFor(c).alphabet).vocab_size();
}

AnyModel::Variant Build(const ExperimentConfig& c) {
  c.Validate();
  Rng rng(c.seed);
  const std::size_t input = InputDim(c);
  const std::size_t vocab = VocabSize(c);
  switch (c.model) {
    case ModelFamily::kRnnt: {
      RnntConfig r;
      r.encoder = EncoderConfigFor(c, input);
      r.vocab_size = vocab;
      r.embed_dim = c.embed_dim;
      r.pred_cell_dim = c.pred_cell_dim;
      r.pred_proj_dim = c.pred_proj_dim;
      r.joint_dim = c.joint_dim;
      return RnntModel(r, rng);
    }
    case ModelFamily::kRnnAed: {
      RnnAedConfig a;
      a.encoder = EncoderConfigFor(c, input);
      a.vocab_size = vocab;
      a.embed_dim = c.embed_dim;
      a.decoder_cell_dim = c.decoder_cell_dim;
      a.decoder_proj_dim = c.decoder_proj_dim;
      a.attention_dim = c.attention_dim;
      a.attention = c.attention;
      a.location_kernel = c.location_kernel;
      a.location_maps = c.location_maps;
      a.mocha_window = c.mocha_window;
      a.mocha_noise_std = c.mocha_noise_std;
      a.mocha_energy_init = c.mocha_energy_init;
      return RnnAedModel(a, rng);
    }
    case ModelFamily::kTransformerAed: {
      TransformerAedConfig t;
      t.input_dim = input;
      t.vgg_channels = c.vgg_channels;
      t.block.model_dim = c.model_dim;
      t.block.heads = c.heads;
      t.block.head_dim = c.head_dim;
      t.block.ffn_dim = c.ffn_dim;
      t.encoder_blocks = c.encoder_blocks;
      t.decoder_blocks = c.decoder_blocks;
      t.vocab_size = vocab;
      t.mask = c.mask;
      t.lookahead = c.LookaheadPerBlock();
      t.chunk_frames = c.chunk_frames;
      t.chunk_right_context = c.chunk_right_context;
      t.decoder_window = c.decoder_window;
      return TransformerAedModel(t, rng);
    }
  }
  throw Error("harness: unknown model family");
}

JointDecodeConfig JointConfigFor(const ExperimentConfig& c) {
  JointDecodeConfig j;
  j.beta1 = c.beta1;
  j.beam = c.beam;
  j.top_k = c.top_k;
  return j;
}

double CpuSeconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

std::string Fixed(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::string FormatMs(double v) {
  if (v == std::floor(v)) return std::to_string(static_cast<long>(v));
  return Fixed(v, 1);
}

}  // namespace

SyntheticTaskSpec TaskSpecFor(const ExperimentConfig& config) {
  SyntheticTaskSpec spec = DefaultTaskSpec();
  spec.seed = config.corpus_seed;
  spec.noise = config.noise;
  return spec;
}

Corpus MakeCorpus(const ExperimentConfig& config) {
  return GenerateSyntheticCorpus(TaskSpecFor(config), config.corpus_size);
}

std::vector<Example> PrepareExamples(const Corpus& corpus, std::size_t stack) {
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (const Utterance& u : corpus) {
    Example ex;
    ex.id = u.id;
    ex.text = u.text;
    ex.features = StackSuperframes(u.features, stack).ToTensor();
    ex.tokens = u.tokens;
    if (!u.alignment.empty()) ex.alignment = DownsampleAlignment(u.alignment, stack);
    out.push_back(std::move(ex));
  }
  return out;
}

LatencySpec LatencySpecFor(const ExperimentConfig& c) {
  LatencySpec s;
  s.name = c.name;
  const int stack = static_cast<int>(c.EffectiveStack());
  s.input_frame_shift_ms = 10;
  if (c.model == ModelFamily::kTransformerAed) {
    s.frontend_stride = static_cast<int>(VggFrontend::kStride) * stack;
    switch (c.mask) {
      case MaskKind::kFull:
        s.kind = LatencyKind::kFullUtterance;
        break;
      case MaskKind::kLookahead:
        s.kind = LatencyKind::kLookahead;
        s.per_block_lookahead = c.LookaheadPerBlock();
        s.decoder_window_frames = static_cast<int>(c.decoder_window);
        break;
      case MaskKind::kChunk:
        s.kind = LatencyKind::kChunk;
        s.chunk_frames = static_cast<int>(c.chunk_frames);
        s.chunk_right_context = static_cast<int>(c.chunk_right_context);
        break;
    }
    return s;
  }
  s.frontend_stride = stack;
  if (c.bidirectional) {
    s.kind = LatencyKind::kFullUtterance;
  } else {
    s.kind = LatencyKind::kLookahead;
    s.per_block_lookahead = c.ContextTauPerBlock();
  }
  return s;
}

AnyModel::AnyModel(const ExperimentConfig& config) : config_(config), model_(Build(config)) {}

ParameterList AnyModel::Parameters() const {
  return std::visit([](const auto& m) { return m.Parameters(); }, model_);
}

DecodeMode AnyModel::ResolvedDecodeMode() const {
  if (config_.decoder != DecodeMode::kAuto) return config_.decoder;
  switch (config_.model) {
    case ModelFamily::kRnnt:
      return DecodeMode::kBeam;
    case ModelFamily::kRnnAed:
      return config_.attention == AttentionKind::kMocha ? DecodeMode::kMochaHard
                                                        : DecodeMode::kAttention;
    case ModelFamily::kTransformerAed:
      return config_.mask == MaskKind::kFull ? DecodeMode::kJoint : DecodeMode::kTriggered;
  }
  return DecodeMode::kAuto;
}

Tensor AnyModel::Loss(const Example& ex, Rng* noise) const {
  Tensor loss;
  if (const auto* m = std::get_if<RnntModel>(&model_)) {
    loss = m->Loss(ex.features, ex.tokens);
  } else if (const auto* m = std::get_if<RnnAedModel>(&model_)) {
    loss = m->Loss(ex.features, ex.tokens, noise);
  } else {
    loss = std::get<TransformerAedModel>(model_).Loss(ex.features, ex.tokens,
                                                       MultiTaskConfig{config_.ctc_weight});
  }
  return Scale(loss, 1.0 / static_cast<double>(ex.tokens.size() + 1));
}

Hypothesis AnyModel::Decode(const Tensor& x) const {
  const DecodeMode mode = ResolvedDecodeMode();
  if (const auto* m = std::get_if<RnntModel>(&model_)) {
    TransducerDecodeConfig t;
    t.beam = config_.beam;
    return mode == DecodeMode::kGreedy ? RnntGreedyDecode(*m, x, t) : RnntBeamDecode(*m, x, t);
  }
  if (const auto* m = std::get_if<RnnAedModel>(&model_)) {
    if (mode == DecodeMode::kMochaHard) return MochaHardDecode(*m, x, config_.beam);
    auto hyps = AttentionBeamDecode(*m, x, JointConfigFor(config_));
    return hyps.empty() ? Hypothesis{} : hyps.front();
  }
  const auto& m = std::get<TransformerAedModel>(model_);
  if (mode == DecodeMode::kTriggered) return TriggeredAttentionDecode(m, x, JointConfigFor(config_));
  auto hyps = AttentionBeamDecode(m, x, JointConfigFor(config_));
  return hyps.empty() ? Hypothesis{} : hyps.front();
}

void SaveModel(const std::string& path, const AnyModel& model) {
  SaveCheckpoint(path, SerializeConfig(model.config()), model.Parameters());
}

AnyModel LoadModel(const std::string& path) {
  Checkpoint ck = LoadCheckpoint(path);
  AnyModel model(ParseConfig(ck.config));
  RestoreParameters(model.Parameters(), ck.tensors);
  return model;
}

namespace {

void PretrainInto(AnyModel& model, std::span<const Example> data, TrainResult& result) {
  const ExperimentConfig& c = model.config();
  auto& rnnt = std::get<RnntModel>(model.model());
  Rng rng(c.seed ^ kPretrainStream);
  LstmEncoder encoder(rnnt.encoder().config(), rng);
  std::vector<PretrainExample> examples;
  examples.reserve(data.size());
  for (const Example& ex : data) examples.push_back({ex.features, ex.tokens, ex.alignment});
  PretrainConfig p;
  p.mode = c.init == InitMode::kCtc ? PretrainMode::kCtc : PretrainMode::kCrossEntropy;
  p.steps = c.pretrain_steps;
  p.batch_size = c.batch_size;
  p.sgd = SgdConfig{c.learning_rate, c.momentum, c.clip_norm};
  p.seed = c.seed ^ kPretrainStream;
  result.pretrain_losses = PretrainEncoder(encoder, rnnt.vocab_size(), examples, p).losses;
  TransferEncoder(encoder, rnnt);
}

}  // namespace

TrainResult Train(AnyModel& model, std::span<const Example> data, const StepCallback& on_step) {
  const ExperimentConfig& c = model.config();
  if (data.empty()) throw Error("train: no training data");
  const double start = CpuSeconds();
  TrainResult result;
  if (c.init != InitMode::kRandom && c.pretrain_steps > 0) PretrainInto(model, data, result);

  SgdMomentum opt(model.Parameters(), SgdConfig{c.learning_rate, c.momentum, c.clip_norm});
  Rng shuffle(c.seed ^ kShuffleStream);
  Rng noise(c.seed ^ kNoiseStream);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  for (std::size_t step = 0; step < c.steps; ++step) {
    double total = 0.0;
    try {
      for (std::size_t b = 0; b < c.batch_size; ++b) {
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), shuffle);
          cursor = 0;
        }
        Tape tape;
        Tensor loss = Scale(model.Loss(data[order[cursor++]], &noise),
                            1.0 / static_cast<double>(c.batch_size));
        total += loss.item();
        tape.Backward(loss);
      }
      if (!std::isfinite(total)) throw Error("loss is not finite");
      opt.Step();
    } catch (const Error& e) {
      throw Error("train: diverged at step " + std::to_string(step + 1) + ": " + e.what());
    }
    result.losses.push_back(total);
    if (on_step) on_step(step + 1, total);
  }
  result.seconds = CpuSeconds() - start;
  return result;
}

std::string LossCurveTsv(std::span<const double> losses) {
  std::ostringstream os;
  os.precision(10);
  os << "step\tloss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) os << i + 1 << '\t' << losses[i] << '\n';
  return os.str();
}

double EvalResult::token_accuracy() const {
  if (tokens.reference_length == 0) return 0.0;
  return std::max(0.0, 1.0 - tokens.rate());
}

EvalResult Evaluate(const AnyModel& model, std::span<const Example> data) {
  if (data.empty()) throw Error("evaluate: empty corpus");
  const Tokenizer tokenizer(TaskSpecFor(model.config()).alphabet);
  EvalResult result;
  for (const Example& ex : data) {
    const Hypothesis hyp = model.Decode(ex.features);
    UtteranceResult u;
    u.id = ex.id;
    u.reference = ex.text;
    u.hypothesis = tokenizer.Decode(hyp.tokens);
    u.score = hyp.score;
    u.frames = hyp.frames;
    u.words = WordErrorRate(u.hypothesis, u.reference);
    u.tokens = TokenErrors(hyp.tokens, ex.tokens);
    result.words += u.words;
    result.tokens += u.tokens;
    result.utterances.push_back(std::move(u));
  }
  return result;
}

std::string FramesString(const std::vector<int>& frames) {
  if (frames.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(frames[i]);
  }
  return out;
}

std::string EvalTsv(const EvalResult& result) {
  std::ostringstream os;
  os << "id\treference\thypothesis\tscore\tsubstitutions\tdeletions\tinsertions\t"
        "reference_words\ttoken_errors\treference_tokens\n";
  for (const UtteranceResult& u : result.utterances) {
    os << u.id << '\t' << u.reference << '\t' << u.hypothesis << '\t' << Fixed(u.score) << '\t'
       << u.words.substitutions << '\t' << u.words.deletions << '\t' << u.words.insertions
       << '\t' << u.words.reference_length << '\t' << u.tokens.errors() << '\t'
       << u.tokens.reference_length << '\n';
  }
  return os.str();
}

std::string EvalSummaryTsv(const EvalResult& r) {
  std::ostringstream os;
  os << "utterances\twer\tsubstitutions\tdeletions\tinsertions\treference_words\t"
        "token_accuracy\n";
  os << r.utterances.size() << '\t' << Fixed(r.wer()) << '\t' << r.words.substitutions << '\t'
     << r.words.deletions << '\t' << r.words.insertions << '\t' << r.words.reference_length
     << '\t' << Fixed(r.token_accuracy()) << '\n';
  return os.str();
}

std::vector<CompareRow> Compare(std::span<const ExperimentConfig> configs,
                                std::span<const std::uint64_t> seeds,
                                const std::function<void(const std::string&)>& log) {
  if (seeds.empty()) throw Error("compare: need at least one seed");
  std::vector<CompareRow> rows;
  for (const ExperimentConfig& base : configs) {
    base.Validate();
    const std::vector<Example> data = PrepareExamples(MakeCorpus(base), base.EffectiveStack());
    std::vector<double> wers, accs;
    for (std::uint64_t seed : seeds) {
      ExperimentConfig c = base;
      c.seed = seed;
      AnyModel model(c);
      Train(model, data);
      const EvalResult r = Evaluate(model, data);
      wers.push_back(r.wer());
      accs.push_back(r.token_accuracy());
      if (log) {
        log(c.name + " seed " + std::to_string(seed) + ": wer " + Fixed(r.wer()) +
            " token_accuracy " + Fixed(r.token_accuracy()));
      }
    }
    CompareRow row;
    row.name = base.name;
    row.seeds = seeds.size();
    const double n = static_cast<double>(wers.size());
    row.wer_mean = std::accumulate(wers.begin(), wers.end(), 0.0) / n;
    row.token_accuracy_mean = std::accumulate(accs.begin(), accs.end(), 0.0) / n;
    if (wers.size() > 1) {
      double ss = 0.0;
      for (double w : wers) ss += (w - row.wer_mean) * (w - row.wer_mean);
      row.wer_std = std::sqrt(ss / (n - 1.0));
    }
    row.latency = EncoderLatencyMs(LatencySpecFor(base));
    rows.push_back(row);
  }
  return rows;
}

std::string CompareTsv(std::span<const CompareRow> rows) {
  std::ostringstream os;
  os << "model\tseeds\twer_mean\twer_std\ttoken_accuracy_mean\tencoder_latency_ms\t"
        "latency_range_ms\tdecoder_extra_ms\n";
  for (const CompareRow& r : rows) {
    os << r.name << '\t' << r.seeds << '\t' << Fixed(r.wer_mean) << '\t' << Fixed(r.wer_std)
       << '\t' << Fixed(r.token_accuracy_mean) << '\t';
    if (r.latency.full_utterance) {
      os << "full\tfull\t0\n";
    } else {
      os << FormatMs(r.latency.avg_ms) << '\t' << r.latency.min_ms << '-' << r.latency.max_ms
         << '\t' << r.latency.decoder_extra_ms << '\n';
    }
  }
  return os.str();
}

}  // namespace asrlab
