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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 8 and 9 train real models and take a few minutes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asrlab/config.h"
#include "asrlab/decoding.h"
#include "asrlab/harness.h"
#include "asrlab/losses.h"
#include "asrlab/mocha.h"
#include "asrlab/ops.h"
#include "asrlab/streaming.h"
#include "asrlab/vgg.h"
#include "gradient_suite.h"
#include "oracles.h"
#include "test_util.h"

namespace asrlab {
namespace {

using testing::RandomLogProbs;
using testing::RandomMatrix;

double CpuSeconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

struct Outcome {
  bool pass = true;
  std::string detail;
  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::vector<int> Labels(std::size_t n, std::size_t classes, Rng& rng) {
  std::uniform_int_distribution<int> d(1, static_cast<int>(classes) - 1);
  std::vector<int> y(n);
  for (int& v : y) v = d(rng);
  return y;
}

Tensor Matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return Tensor::FromValues({rows, cols}, std::vector<double>(v));
}

Outcome TransducerOracle() {
  Outcome o;
  Rng rng(101);
  const double start = CpuSeconds();
  int instances = 0;
  double worst = 0.0;
  for (std::size_t frames = 1; frames <= 4; ++frames)
    for (std::size_t labels = 0; labels <= 3; ++labels)
      for (std::size_t classes = 2; classes <= 4; ++classes)
        for (int rep = 0; rep < 5; ++rep, ++instances) {
          const auto y = Labels(labels, classes, rng);
          const std::size_t rows = frames * (labels + 1);
          const auto lp = RandomLogProbs(rows, classes, rng);
          const double loss = TransducerLoss(Matrix(lp, rows, classes), frames, y).item();
          worst = std::max(worst,
                           std::abs(loss + oracle::TransducerPathSum(lp, frames, classes, y)));
        }
  const double seconds = CpuSeconds() - start;
  std::ostringstream d;
  d << instances << " instances, max |diff| " << worst << ", " << seconds << " s";
  o.detail = d.str();
  if (instances < 200) o.Fail("too few instances");
  if (worst > 1e-8) o.Fail(d.str());
  if (seconds >= 5.0) o.Fail(d.str());
  return o;
}

Outcome CtcOracle() {
  Outcome o;
  Rng rng(102);
  int instances = 0;
  double worst = 0.0;
  for (std::size_t frames = 1; frames <= 6; ++frames)
    for (std::size_t labels = 0; labels <= 3; ++labels)
      for (std::size_t classes = 2; classes <= 4; ++classes)
        for (int rep = 0; rep < 4; ++rep) {
          const auto y = Labels(labels, classes, rng);
          if (CtcMinimumFrames(y) > frames) continue;
          ++instances;
          const auto lp = RandomLogProbs(frames, classes, rng);
          const double loss = CtcLoss(Matrix(lp, frames, classes), y).item();
          worst = std::max(worst,
                           std::abs(loss + oracle::CtcAlignmentSum(lp, frames, classes, y)));
        }
  std::ostringstream d;
  d << instances << " feasible instances, max |diff| " << worst;
  o.detail = d.str();
  if (instances < 200) o.Fail("too few instances");
  if (worst > 1e-8) o.Fail(d.str());
  return o;
}

Outcome Gradients() {
  Outcome o;
  double worst = 0.0;
  std::size_t cases = 0;
  for (const testing::GradientCase& c : testing::GradientSuite()) {
    const GradCheckResult r = c.run();
    ++cases;
    worst = std::max(worst, r.max_relative_error);
    if (r.max_relative_error > 1e-4) {
      std::ostringstream d;
      d << c.name << " max relative error " << r.max_relative_error;
      o.Fail(d.str());
    }
  }
  if (o.pass) {
    std::ostringstream d;
    d << cases << " cases, worst relative error " << worst;
    o.detail = d.str();
  }
  return o;
}

Outcome Latency() {
  Outcome o;
  LatencySpec context;
  context.per_block_lookahead.assign(6, 4);
  context.frontend_stride = 3;
  if (EncoderLatencyMs(context).total_ms != 720) o.Fail("6 x 4 x 30 ms");

  LatencySpec lookahead;
  lookahead.per_block_lookahead.assign(18, 1);
  lookahead.frontend_stride = 4;
  if (EncoderLatencyMs(lookahead).max_ms != 720) o.Fail("18 x 1 x 4 x 10 ms");
  lookahead.decoder_window_frames = 6;
  const LatencyReport with_decoder = EncoderLatencyMs(lookahead);
  if (with_decoder.decoder_extra_ms != 240 || with_decoder.total_ms != 960)
    o.Fail("lookahead decoder window");

  LatencySpec chunk;
  chunk.kind = LatencyKind::kChunk;
  chunk.chunk_frames = 12;
  chunk.chunk_right_context = 12;
  chunk.frontend_stride = 4;
  const LatencyReport c = EncoderLatencyMs(chunk);
  // avg is (min + max) / 2 of two integers; compare in integer arithmetic.
  if (c.min_ms != 480 || c.max_ms != 960 || c.min_ms + c.max_ms != 2 * 720)
    o.Fail("chunk range");
  if (o.pass) o.detail = "720 / 720 (+240) / [480, 960] avg 720 ms";
  return o;
}

int MaxOf(const std::vector<int>& d) { return *std::max_element(d.begin(), d.end()); }

// Measured future reach must equal the declared lookahead for every frame
// that has that many frames after it, and the remaining frames otherwise.
bool MatchesDeclared(const std::vector<int>& measured, int declared) {
  for (std::size_t t = 0; t < measured.size(); ++t) {
    const int remaining = static_cast<int>(measured.size() - 1 - t);
    if (measured[t] > declared) return false;
    if (measured[t] != std::min(declared, remaining) && remaining >= declared) return false;
  }
  return MaxOf(measured) == declared;
}

LstmEncoder ProbeEncoder(std::size_t blocks, int tau, std::size_t width, Rng& rng) {
  LstmEncoderConfig c;
  c.input_dim = 2;
  c.blocks = blocks;
  c.cell_dim = width + 2;
  c.proj_dim = width;
  c.context_tau.assign(blocks, tau);
  LstmEncoder enc(c, rng);
  // Reach is structural: random taps keep every path measurable.
  ParameterList params;
  enc.Collect("e", params);
  std::normal_distribution<double> n(0.0, 1.0);
  for (NamedTensor& p : params)
    if (p.name.ends_with(".context.q"))
      for (double& v : p.tensor.mutable_values()) v = n(rng);
  return enc;
}

Outcome Causality() {
  Outcome o;
  std::ostringstream d;
  {
    Rng rng(3);
    LstmEncoder enc = ProbeEncoder(2, 0, 3, rng);
    SequenceFunction f = [&](const Tensor& x) { return enc.Forward(x); };
    const int measured = MaxOf(MeasureFutureDependence(f, RandomMatrix(8, 2, rng)));
    LatencySpec spec;
    spec.per_block_lookahead.assign(2, 0);
    if (measured != EncoderLatencyMs(spec).lookahead_frames) o.Fail("uni-LSTM reach");
    d << "uni-LSTM " << measured;
  }
  {
    Rng rng(5);
    LstmEncoder enc = ProbeEncoder(6, 4, 6, rng);
    SequenceFunction f = [&](const Tensor& x) { return enc.Forward(x); };
    const std::vector<int> m = MeasureFutureDependence(f, RandomMatrix(30, 2, rng));
    LatencySpec spec;
    spec.per_block_lookahead.assign(6, 4);
    const int declared = EncoderLatencyMs(spec).lookahead_frames;
    if (declared != 24 || !MatchesDeclared(m, declared)) {
      std::string got;
      for (int v : m) got += std::to_string(v) + " ";
      o.Fail("context encoder reach: " + got);
    }
    d << ", context 6x4 " << MaxOf(m);
  }
  {
    Rng rng(11);
    TransformerAedConfig c = testing::TinyTransformerConfig(MaskKind::kLookahead, 3);
    c.encoder_blocks = 3;
    c.lookahead = {1, 0, 2};
    TransformerAedModel m(c, rng);
    SequenceFunction f = [&](const Tensor& x) { return m.Encode(x); };
    const std::vector<int> measured = MeasureFutureDependence(f, RandomMatrix(40, 3, rng), 4);
    LatencySpec spec;
    spec.per_block_lookahead = c.lookahead;
    if (!MatchesDeclared(measured, EncoderLatencyMs(spec).lookahead_frames))
      o.Fail("lookahead transformer reach");
    d << ", lookahead {1,0,2} " << MaxOf(measured);
  }
  for (std::size_t right : {0, 2}) {
    Rng rng(13 + right);
    TransformerAedConfig c = testing::TinyTransformerConfig(MaskKind::kChunk, 3);
    c.encoder_blocks = 2;
    c.chunk_frames = 3;
    c.chunk_right_context = right;
    TransformerAedModel m(c, rng);
    SequenceFunction f = [&](const Tensor& x) { return m.Encode(x); };
    const std::vector<int> measured = MeasureFutureDependence(f, RandomMatrix(48, 3, rng), 4);
    LatencySpec spec;
    spec.kind = LatencyKind::kChunk;
    spec.chunk_frames = 3;
    spec.chunk_right_context = static_cast<int>(right);
    if (MaxOf(measured) != EncoderLatencyMs(spec).lookahead_frames) o.Fail("chunk reach");
    // Within a chunk the reach falls by one per frame.
    for (std::size_t t = 0; t + 6 < measured.size(); ++t)
      if (measured[t] != static_cast<int>(2 - t % 3 + right)) o.Fail("chunk frame reach");
    d << ", chunk 3+" << right << " " << MaxOf(measured);
  }
  {
    Rng rng(17);
    TransformerAedModel model(testing::TinyTransformerConfig(MaskKind::kFull), rng);
    Tensor x = RandomMatrix(11, 3, rng);
    const std::vector<int> y{3, 4};
    const std::size_t frames = VggFrontend::OutputLength(11);
    const TransformerAedOutput full = model.Forward(x, y, BuildFullMask(frames, 1));
    for (std::size_t chunk : {frames, frames + 3}) {
      const TransformerAedOutput c = model.Forward(x, y, BuildChunkMask(frames, 1, chunk));
      const auto same = [](const Tensor& a, const Tensor& b) {
        return std::equal(a.values().begin(), a.values().end(), b.values().begin(),
                          b.values().end());
      };
      if (!same(full.ctc_log_probs, c.ctc_log_probs) ||
          !same(full.attention_log_probs, c.attention_log_probs))
        o.Fail("chunk >= T differs from full");
    }
    d << ", chunk >= T bit-exact";
  }
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome MochaMonteCarlo() {
  Outcome o;
  constexpr std::size_t kFrames = 5, kWindow = 2, kDim = 3, kSamples = 100000;
  Rng rng(606);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> p(2), energy(2);
  for (int u = 0; u < 2; ++u)
    for (std::size_t t = 0; t < kFrames; ++t) {
      p[u].push_back(0.15 + 0.7 * unit(rng));
      energy[u].push_back(2.0 * unit(rng) - 1.0);
    }
  const Tensor h = RandomMatrix(kFrames, kDim, rng);

  // Expected contexts.
  std::vector<std::vector<double>> expected(2, std::vector<double>(kDim, 0.0));
  Tensor previous = MochaInitialAlignment(kFrames);
  for (int u = 0; u < 2; ++u) {
    const MochaExpectation e =
        MochaExpectedAttention(Matrix(p[u], 1, kFrames), previous,
                               Matrix(energy[u], 1, kFrames), kWindow);
    for (std::size_t t = 0; t < kFrames; ++t)
      for (std::size_t k = 0; k < kDim; ++k) expected[u][k] += e.beta.values()[t] * h.at(t, k);
    previous = e.alpha;
  }

  // Hard sampled paths: Bernoulli selections scanned left to right from the
  // previous boundary; an unfired step leaves a zero context from then on.
  std::vector<std::vector<double>> sum(2, std::vector<double>(kDim, 0.0)), sq = sum;
  for (std::size_t s = 0; s < kSamples; ++s) {
    std::size_t start = 0;
    bool alive = true;
    for (int u = 0; u < 2; ++u) {
      std::vector<double> c(kDim, 0.0);
      if (alive) {
        std::vector<double> z(kFrames);
        for (std::size_t t = 0; t < kFrames; ++t) z[t] = unit(rng) < p[u][t] ? 1.0 : 0.0;
        const HardMochaStep step = MochaHardAttend(z, energy[u], start, kWindow);
        if (step.boundary) {
          start = *step.boundary;
          for (std::size_t t = 0; t < kFrames; ++t)
            for (std::size_t k = 0; k < kDim; ++k) c[k] += step.weights[t] * h.at(t, k);
        } else {
          alive = false;
        }
      }
      for (std::size_t k = 0; k < kDim; ++k) {
        sum[u][k] += c[k];
        sq[u][k] += c[k] * c[k];
      }
    }
  }
  double worst = 0.0;
  for (int u = 0; u < 2; ++u)
    for (std::size_t k = 0; k < kDim; ++k) {
      const double mean = sum[u][k] / kSamples;
      const double var = sq[u][k] / kSamples - mean * mean;
      const double se = std::sqrt(std::max(var, 0.0) / kSamples);
      const double z = std::abs(mean - expected[u][k]) / std::max(se, 1e-12);
      worst = std::max(worst, z);
    }
  std::ostringstream d;
  d << "T=5 U=2, 1e5 samples, worst deviation " << worst << " SE";
  o.detail = d.str();
  if (worst > 3.0) o.Fail(d.str());
  return o;
}

// Random log-distributions keyed by (frame, prefix) for transducer search and
// by prefix for attention scoring.
class JointTable {
 public:
  JointTable(std::size_t vocab, std::uint64_t seed) : vocab_(vocab), rng_(seed) {}
  std::vector<double> operator()(std::size_t t, const TokenSequence& prefix) {
    auto key = std::make_pair(t, prefix);
    auto it = table_.find(key);
    if (it == table_.end())
      it = table_.emplace(key, RandomLogProbs(1, vocab_, rng_, 3.0)).first;
    return it->second;
  }

 private:
  std::size_t vocab_;
  Rng rng_;
  std::map<std::pair<std::size_t, TokenSequence>, std::vector<double>> table_;
};

Outcome BeamExactness() {
  Outcome o;
  int transducer = 0, joint = 0;
  for (std::size_t frames = 1; frames <= 4; ++frames)
    for (int labels = 1; labels <= 2; ++labels)
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const std::size_t vocab = kFirstLabel + labels;
        JointTable table(vocab, seed * 97 + frames);
        TransducerJoint fn = [&](std::size_t t, const TokenSequence& p) { return table(t, p); };
        TransducerDecodeConfig cfg;
        cfg.beam = 512;
        cfg.max_length = 3;
        const Hypothesis got = TransducerBeamSearch(frames, vocab, fn, cfg);
        double best = -INFINITY;
        TokenSequence best_y;
        for (const auto& y : oracle::AllSequences(kFirstLabel, labels, 3)) {
          std::vector<double> grid;
          for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t u = 0; u <= y.size(); ++u) {
              auto row = table(t, TokenSequence(y.begin(), y.begin() + u));
              grid.insert(grid.end(), row.begin(), row.end());
            }
          const double s = oracle::TransducerPathSum(grid, frames, vocab, y);
          if (s > best) {
            best = s;
            best_y = y;
          }
        }
        ++transducer;
        if (got.tokens != best_y) o.Fail("transducer beam missed the argmax");
      }

  for (std::size_t frames = 2; frames <= 6; ++frames)
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      constexpr std::size_t kVocab = kFirstLabel + 2;
      Rng rng(seed * 13 + frames);
      const Tensor ctc = Matrix(RandomLogProbs(frames, kVocab, rng, 2.0), frames, kVocab);
      std::map<TokenSequence, std::vector<double>> att_table;
      NextTokenScorer att = [&](const TokenSequence& prefix) {
        auto it = att_table.find(prefix);
        if (it == att_table.end()) {
          std::vector<double> lp = RandomLogProbs(1, kVocab, rng, 3.0);
          lp[kBlank] = lp[kSos] = -INFINITY;
          it = att_table.emplace(prefix, lp).first;
        }
        return it->second;
      };
      JointDecodeConfig cfg;
      cfg.beta1 = 0.3;
      cfg.beam = 64;
      cfg.top_k = 3;
      cfg.max_length = 3;
      const std::vector<Hypothesis> got = JointBeamSearch(ctc, att, kVocab, frames, cfg);
      double best = -INFINITY;
      TokenSequence best_y;
      for (const auto& y : oracle::AllSequences(kFirstLabel, 2, 3)) {
        double a = 0.0;
        for (std::size_t i = 0; i <= y.size(); ++i)
          a += att(TokenSequence(y.begin(), y.begin() + i))[i < y.size() ? y[i] : kEos];
        const double s =
            oracle::CtcAlignmentSum(ctc.values(), frames, kVocab, y) + cfg.beta1 * a;
        if (s > best) {
          best = s;
          best_y = y;
        }
      }
      ++joint;
      if (got.empty() || got.front().tokens != best_y) o.Fail("joint beam missed the argmax");
    }
  std::ostringstream d;
  d << transducer << " transducer and " << joint << " joint instances";
  if (o.pass) o.detail = d.str();
  return o;
}

std::vector<std::string> ConfigFiles(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".cfg") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

Outcome EndToEnd() {
  Outcome o;
  std::ostringstream d;
  for (const std::string& path : ConfigFiles(std::string(ASRLAB_CONFIG_DIR) + "/acceptance")) {
    const ExperimentConfig config = LoadConfigFile(path);
    const std::vector<Example> data = PrepareExamples(MakeCorpus(config), config.EffectiveStack());
    const double start = CpuSeconds();
    AnyModel model(config);
    Train(model, data);
    const EvalResult eval = Evaluate(model, data);
    const double seconds = CpuSeconds() - start;
    char line[256];
    std::snprintf(line, sizeof line, "  %-22s %zu utts  token acc %.4f  wer %.4f  %.1f s cpu",
                  config.name.c_str(), data.size(), eval.token_accuracy(), eval.wer(), seconds);
    std::cout << line << std::endl;
    if (data.size() < 200) o.Fail(config.name + ": corpus smaller than 200");
    if (eval.token_accuracy() < 0.95) o.Fail(config.name + ": token accuracy below 0.95");
    if (seconds > 300.0) o.Fail(config.name + ": over 5 minutes of CPU");
    d << (d.tellp() > 0 ? ", " : "") << config.name;
  }
  if (d.tellp() == 0) o.Fail("no acceptance configs");
  if (o.pass) o.detail = d.str();
  return o;
}

bool IsNumber(const std::string& s) {
  if (s == "full") return true;
  // Ranges print as "<min>-<max>".
  const auto dash = s.find('-', 1);
  if (dash != std::string::npos) return IsNumber(s.substr(0, dash)) && IsNumber(s.substr(dash + 1));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  return !s.empty() && *end == '\0' && std::isfinite(v);
}

Outcome Trends() {
  Outcome o;
  std::vector<ExperimentConfig> configs;
  for (const std::string& path : ConfigFiles(std::string(ASRLAB_CONFIG_DIR) + "/compare"))
    configs.push_back(LoadConfigFile(path));
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const std::vector<CompareRow> rows = Compare(configs, seeds);
  const std::string tsv = CompareTsv(rows);
  std::cout << tsv;
  std::istringstream in(tsv);
  std::string line;
  std::size_t lines = 0, columns = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, '\t');) fields.push_back(f);
    if (lines == 0) {
      columns = fields.size();
    } else {
      if (fields.size() != columns) o.Fail("ragged row: " + line);
      for (std::size_t i = 1; i < fields.size(); ++i)
        if (!IsNumber(fields[i])) o.Fail("non-numeric field: " + fields[i]);
    }
    ++lines;
  }
  if (lines != configs.size() + 1 || configs.size() < 6) o.Fail("wrong row count");
  for (const CompareRow& r : rows)
    if (r.seeds != seeds.size()) o.Fail(r.name + ": missing seeds");
  if (o.pass) o.detail = std::to_string(rows.size()) + " rows over 3 seeds";
  return o;
}

}  // namespace
}  // namespace asrlab

// Optional arguments pick criteria by number, e.g. `acceptance 1 5`.
int main(int argc, char** argv) {
  using namespace asrlab;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 transducer loss oracle", TransducerOracle},
      {"2 ctc loss oracle", CtcOracle},
      {"3 gradient suite", Gradients},
      {"4 latency arithmetic", Latency},
      {"5 causality", Causality},
      {"6 mocha expectation vs monte carlo", MochaMonteCarlo},
      {"7 beam search exactness", BeamExactness},
      {"8 end-to-end toy task", EndToEnd},
      {"9 trend table", Trends},
  };
  int failures = 0;
  const std::vector<std::string> only(argv + 1, argv + argc);
  for (const auto& [name, run] : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), name.substr(0, name.find(' '))) == only.end())
      continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
