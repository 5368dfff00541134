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
#include "asrlab/data.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "asrlab/losses.h"
#include "asrlab/params.h"

namespace asrlab {

void FeatureSequence::Validate() const {
  if (frames == 0) throw Error("features: no frames");
  if (dim == 0) throw Error("features: zero dimension");
  if (values.size() != frames * dim) {
    throw Error("features: payload of " + std::to_string(values.size()) +
                " values does not fill " + std::to_string(frames) + " x " +
                std::to_string(dim));
  }
  if (!(frame_shift_ms > 0.0)) throw Error("features: frame shift must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("features: non-finite value");
  }
}

Tensor FeatureSequence::ToTensor() const {
  Validate();
  return Tensor::FromValues({frames, dim}, values);
}

FeatureSequence StackSuperframes(const FeatureSequence& x, std::size_t stack) {
  if (stack == 0) throw Error("stack superframes: stack must be >= 1");
  x.Validate();
  FeatureSequence out;
  out.frames = (x.frames + stack - 1) / stack;
  out.dim = x.dim * stack;
  out.frame_shift_ms = x.frame_shift_ms * static_cast<double>(stack);
  out.values.assign(out.frames * out.dim, 0.0);
  for (std::size_t t = 0; t < x.frames; ++t) {
    const std::size_t g = t / stack, slot = t % stack;
    std::copy_n(x.values.begin() + t * x.dim, x.dim,
                out.values.begin() + g * out.dim + slot * x.dim);
  }
  return out;
}

std::vector<int> DownsampleAlignment(std::span<const int> alignment, std::size_t stack) {
  if (stack == 0) throw Error("downsample alignment: stack must be >= 1");
  const std::size_t groups = (alignment.size() + stack - 1) / stack;
  std::vector<int> out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t mid = std::min(alignment.size() - 1, g * stack + stack / 2);
    out[g] = alignment[mid];
  }
  return out;
}

Tokenizer::Tokenizer(std::string alphabet) : alphabet_(std::move(alphabet)) {
  std::string sorted = alphabet_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("tokenizer: duplicate character in alphabet");
  }
}

TokenSequence Tokenizer::Encode(std::string_view text) const {
  TokenSequence out;
  out.reserve(text.size());
  for (char ch : text) {
    auto pos = alphabet_.find(ch);
    if (pos == std::string::npos) {
      throw Error(std::string("tokenizer: character '") + ch + "' not in vocabulary");
    }
    out.push_back(kFirstLabel + static_cast<int>(pos));
  }
  return out;
}

std::string Tokenizer::Decode(std::span<const int> tokens) const {
  std::string out;
  out.reserve(tokens.size());
  for (int id : tokens) {
    const int k = id - kFirstLabel;
    if (k < 0 || static_cast<std::size_t>(k) >= alphabet_.size()) {
      throw Error("tokenizer: id " + std::to_string(id) + " is not a payload token");
    }
    out.push_back(alphabet_[static_cast<std::size_t>(k)]);
  }
  return out;
}

SyntheticTaskSpec DefaultTaskSpec() {
  SyntheticTaskSpec spec;
  spec.words = {"bad", "cab", "ace", "bead", "fade", "deaf", "chef", "hag", "gab", "head"};
  const std::size_t n = spec.words.size();
  spec.successors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    spec.initial.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) spec.successors[i].push_back(j);
    }
  }
  return spec;
}

std::vector<double> TokenPrototype(const SyntheticTaskSpec& spec, int token,
                                   std::size_t k, std::size_t n) {
  // Onset and offset prototypes come from a stream keyed by (seed, token) so
  // they do not depend on which utterances are generated.
  Rng rng(spec.seed * 1000003ULL + static_cast<std::uint64_t>(token) * 7919ULL + 17ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> onset(spec.feature_dim), offset(spec.feature_dim);
  for (double& v : onset) v = normal(rng);
  for (double& v : offset) v = normal(rng);
  const double s = n <= 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
  std::vector<double> out(spec.feature_dim);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (1.0 - s) * onset[j] + s * offset[j];
  return out;
}

Corpus GenerateSyntheticCorpus(const SyntheticTaskSpec& spec, std::size_t n_utts) {
  if (spec.words.empty() || spec.initial.empty()) {
    throw Error("synthetic corpus: empty grammar");
  }
  if (n_utts == 0) throw Error("synthetic corpus: need at least one utterance");
  if (spec.successors.size() != spec.words.size()) {
    throw Error("synthetic corpus: successor table does not match the lexicon");
  }
  if (spec.min_frames_per_token == 0 || spec.min_frames_per_token > spec.max_frames_per_token ||
      spec.min_words == 0 || spec.min_words > spec.max_words || spec.feature_dim == 0) {
    throw Error("synthetic corpus: inconsistent duration or length limits");
  }
  Tokenizer tokenizer(spec.alphabet);

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Corpus corpus;
  corpus.reserve(n_utts);
  for (std::size_t n = 0; n < n_utts; ++n) {
    Utterance utt;
    utt.id = "utt" + std::to_string(n);
    const std::size_t n_words = std::uniform_int_distribution<std::size_t>(
        spec.min_words, spec.max_words)(rng);
    std::size_t word = spec.initial[std::uniform_int_distribution<std::size_t>(
        0, spec.initial.size() - 1)(rng)];
    for (std::size_t w = 0; w < n_words; ++w) {
      if (w > 0) {
        const auto& next = spec.successors[word];
        if (next.empty()) break;
        word = next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)];
        utt.text += ' ';
      }
      utt.text += spec.words[word];
    }
    utt.tokens = tokenizer.Encode(utt.text);

    // (token, run length) segments including edge silence.
    std::vector<std::pair<int, std::size_t>> runs;
    std::uniform_int_distribution<std::size_t> silence(0, spec.max_edge_silence);
    std::uniform_int_distribution<std::size_t> duration(spec.min_frames_per_token,
                                                        spec.max_frames_per_token);
    if (std::size_t s = silence(rng)) runs.emplace_back(kBlank, s);
    for (int tok : utt.tokens) runs.emplace_back(tok, duration(rng));
    if (std::size_t s = silence(rng)) runs.emplace_back(kBlank, s);

    utt.features.dim = spec.feature_dim;
    utt.features.frame_shift_ms = 10.0;
    for (const auto& [tok, len] : runs) {
      for (std::size_t k = 0; k < len; ++k) {
        std::vector<double> frame = TokenPrototype(spec, tok, k, len);
        for (double& v : frame) {
          if (spec.noise > 0.0) v += spec.noise * normal(rng);
        }
        utt.features.values.insert(utt.features.values.end(), frame.begin(), frame.end());
        utt.alignment.push_back(tok);
      }
    }
    utt.features.frames = utt.alignment.size();
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace asrlab
