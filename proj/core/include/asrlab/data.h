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
// Synthetic toy ASR task: features, token inventory and corpus generation.

#ifndef ASRLAB_DATA_H_
#define ASRLAB_DATA_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

// Reserved ids shared by every model. Payload labels start at kFirstLabel.
inline constexpr int kSos = 1;
inline constexpr int kEos = 2;
inline constexpr int kFirstLabel = 3;

using TokenSequence = std::vector<int>;

// Time-major frames x dim matrix of acoustic features.
struct FeatureSequence {
  std::size_t frames = 0;
  std::size_t dim = 0;
  double frame_shift_ms = 10.0;
  std::vector<double> values;

  double at(std::size_t t, std::size_t j) const { return values[t * dim + j]; }
  // Throws unless frames >= 1, the payload fills frames x dim and every value
  // is finite.
  void Validate() const;
  Tensor ToTensor() const;
};

// Concatenates groups of `stack` consecutive frames; the last group is
// zero-padded. Output has ceil(T / stack) frames of stack * dim features and
// a frame shift multiplied by `stack`.
FeatureSequence StackSuperframes(const FeatureSequence& x, std::size_t stack);

// Per-frame labels after stacking: each group takes the label of its middle
// frame.
std::vector<int> DownsampleAlignment(std::span<const int> alignment, std::size_t stack);

// Character-level tokenizer over a fixed alphabet.
class Tokenizer {
 public:
  explicit Tokenizer(std::string alphabet);

  TokenSequence Encode(std::string_view text) const;
  std::string Decode(std::span<const int> tokens) const;
  // Reserved ids plus one id per character.
  std::size_t vocab_size() const { return kFirstLabel + alphabet_.size(); }
  const std::string& alphabet() const { return alphabet_; }

 private:
  std::string alphabet_;
};

struct SyntheticTaskSpec {
  std::string alphabet = "abcdefgh ";
  std::vector<std::string> words;
  // successors[i] lists the words that may follow word i; `initial` lists
  // the words that may start an utterance.
  std::vector<std::vector<std::size_t>> successors;
  std::vector<std::size_t> initial;
  std::size_t min_words = 1;
  std::size_t max_words = 3;
  std::size_t min_frames_per_token = 6;
  std::size_t max_frames_per_token = 9;
  std::size_t max_edge_silence = 4;
  std::size_t feature_dim = 16;
  double noise = 0.1;
  std::uint64_t seed = 1;
};

// Small lexicon over "abcdefgh" with an any-to-any (no immediate repeat)
// word grammar.
SyntheticTaskSpec DefaultTaskSpec();

struct Utterance {
  std::string id;
  FeatureSequence features;
  std::string text;
  TokenSequence tokens;
  // Token id per raw frame; kBlank marks silence.
  std::vector<int> alignment;
};

using Corpus = std::vector<Utterance>;

// Noise-free feature vector of frame `k` within a run of `n` frames of
// `token`: a straight line from the token's onset prototype to its offset
// prototype. Prototypes depend only on the spec seed.
std::vector<double> TokenPrototype(const SyntheticTaskSpec& spec, int token,
                                   std::size_t k, std::size_t n);

Corpus GenerateSyntheticCorpus(const SyntheticTaskSpec& spec, std::size_t n_utts);

// Splits on single spaces; empty fields are dropped.
std::vector<std::string> SplitWords(std::string_view text);

}  // namespace asrlab

#endif  // ASRLAB_DATA_H_
