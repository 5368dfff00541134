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
// Experiment orchestration: model construction from a config, training,
// evaluation and multi-seed comparison.

#ifndef ASRLAB_HARNESS_H_
#define ASRLAB_HARNESS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "asrlab/config.h"
#include "asrlab/data.h"
#include "asrlab/decoding.h"
#include "asrlab/rnn_aed.h"
#include "asrlab/rnnt.h"
#include "asrlab/streaming.h"
#include "asrlab/transformer_aed.h"

namespace asrlab {

// Task definition shared by every experiment; the corpus seed and noise come
// from the config.
SyntheticTaskSpec TaskSpecFor(const ExperimentConfig& config);
Corpus MakeCorpus(const ExperimentConfig& config);

// One utterance in model-ready form.
struct Example {
  std::string id;
  std::string text;
  Tensor features;             // stacked frames x (stack * feature dim)
  TokenSequence tokens;
  std::vector<int> alignment;  // per stacked frame
};

std::vector<Example> PrepareExamples(const Corpus& corpus, std::size_t stack);

// Latency of the configured encoder (and decoder window) in milliseconds of
// 10 ms input frames.
LatencySpec LatencySpecFor(const ExperimentConfig& config);

class AnyModel {
 public:
  using Variant = std::variant<RnntModel, RnnAedModel, TransformerAedModel>;

  // Fresh initialization from config.seed.
  explicit AnyModel(const ExperimentConfig& config);

  const ExperimentConfig& config() const { return config_; }
  const Variant& model() const { return model_; }
  Variant& model() { return model_; }
  ParameterList Parameters() const;

  // Training objective for one example, normalized per output token
  // (transcript length + 1). The RNG feeds MoChA's pre-sigmoid noise.
  Tensor Loss(const Example& example, Rng* noise) const;
  Hypothesis Decode(const Tensor& features) const;
  // The decoding mode "auto" resolves to.
  DecodeMode ResolvedDecodeMode() const;

 private:
  ExperimentConfig config_;
  Variant model_;
};

// Checkpoint with the serialized config embedded.
void SaveModel(const std::string& path, const AnyModel& model);
AnyModel LoadModel(const std::string& path);

struct TrainResult {
  // Mean per-token loss of each optimizer step.
  std::vector<double> losses;
  std::vector<double> pretrain_losses;
  double seconds = 0.0;
};

// Called after every optimizer step with (step, loss).
using StepCallback = std::function<void(std::size_t, double)>;

// Runs config.steps optimizer steps (after encoder pretraining when
// config.init asks for it). A non-finite loss or gradient aborts with the
// step number.
TrainResult Train(AnyModel& model, std::span<const Example> data,
                  const StepCallback& on_step = {});

std::string LossCurveTsv(std::span<const double> losses);

struct UtteranceResult {
  std::string id;
  std::string reference;
  std::string hypothesis;
  double score = 0.0;
  // Per-token trigger or boundary frames; empty when the decoder has none.
  std::vector<int> frames;
  ErrorCounts words;
  ErrorCounts tokens;
};

struct EvalResult {
  ErrorCounts words;
  ErrorCounts tokens;
  std::vector<UtteranceResult> utterances;
  double wer() const { return words.rate(); }
  // 1 - token error rate, floored at 0.
  double token_accuracy() const;
};

EvalResult Evaluate(const AnyModel& model, std::span<const Example> data);
// Comma-separated frames ("-" when empty).
std::string FramesString(const std::vector<int>& frames);
std::string EvalTsv(const EvalResult& result);
std::string EvalSummaryTsv(const EvalResult& result);

struct CompareRow {
  std::string name;
  std::size_t seeds = 0;
  double wer_mean = 0.0;
  double wer_std = 0.0;
  double token_accuracy_mean = 0.0;
  LatencyReport latency;
};

// Trains and evaluates every config once per seed (the seed replaces
// config.seed; the corpus stays fixed). Standard deviations are sample
// deviations, 0 for a single seed.
std::vector<CompareRow> Compare(std::span<const ExperimentConfig> configs,
                                std::span<const std::uint64_t> seeds,
                                const std::function<void(const std::string&)>& log = {});
std::string CompareTsv(std::span<const CompareRow> rows);

}  // namespace asrlab

#endif  // ASRLAB_HARNESS_H_
