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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <cstring>
#include <set>
#include <sstream>

#include "asrlab/corpus_io.h"
#include "asrlab/data.h"
#include "asrlab/losses.h"

namespace asrlab {
namespace {

SyntheticTaskSpec SpecWithNoise(double noise, std::uint64_t seed = 1) {
  SyntheticTaskSpec s = DefaultTaskSpec();
  s.noise = noise;
  s.seed = seed;
  return s;
}

TEST(SyntheticCorpus, SameSeedIsBitIdentical) {
  Corpus a = GenerateSyntheticCorpus(SpecWithNoise(0.1), 20);
  Corpus b = GenerateSyntheticCorpus(SpecWithNoise(0.1), 20);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].text, b[i].text);
    EXPECT_EQ(a[i].alignment, b[i].alignment);
    EXPECT_EQ(std::memcmp(a[i].features.values.data(), b[i].features.values.data(),
                          a[i].features.values.size() * sizeof(double)),
              0);
  }
  Corpus c = GenerateSyntheticCorpus(SpecWithNoise(0.1, 2), 20);
  EXPECT_NE(a[0].features.values, c[0].features.values);
}

TEST(SyntheticCorpus, NoiseFreeFramesAreExactPrototypes) {
  SyntheticTaskSpec spec = SpecWithNoise(0.0);
  for (const Utterance& u : GenerateSyntheticCorpus(spec, 10)) {
    std::size_t t = 0;
    for (const auto& [token, run] : RunLengths(u.alignment)) {
      for (std::size_t k = 0; k < run; ++k, ++t) {
        std::vector<double> proto = TokenPrototype(spec, token, k, run);
        for (std::size_t j = 0; j < spec.feature_dim; ++j) ASSERT_EQ(u.features.at(t, j), proto[j]);
      }
    }
    EXPECT_EQ(t, u.features.frames);
  }
}

TEST(SyntheticCorpus, AlignmentsAreExact) {
  SyntheticTaskSpec spec = SpecWithNoise(0.1);
  Tokenizer tok(spec.alphabet);
  for (const Utterance& u : GenerateSyntheticCorpus(spec, 50)) {
    u.features.Validate();
    EXPECT_EQ(u.alignment.size(), u.features.frames);
    TokenSequence collapsed;
    for (const auto& [token, run] : RunLengths(u.alignment)) {
      EXPECT_GE(run, token == kBlank ? 1u : spec.min_frames_per_token);
      EXPECT_LE(run, token == kBlank ? spec.max_edge_silence : spec.max_frames_per_token);
      if (token != kBlank) collapsed.push_back(token);
    }
    EXPECT_EQ(collapsed, u.tokens);
    EXPECT_EQ(tok.Decode(u.tokens), u.text);
    std::vector<std::string> words = SplitWords(u.text);
    EXPECT_GE(words.size(), spec.min_words);
    EXPECT_LE(words.size(), spec.max_words);
  }
}

TEST(SyntheticCorpus, RejectsBadSpecs) {
  SyntheticTaskSpec spec = DefaultTaskSpec();
  EXPECT_THROW(GenerateSyntheticCorpus(spec, 0), Error);
  spec.words.clear();
  EXPECT_THROW(GenerateSyntheticCorpus(spec, 1), Error);
  spec = DefaultTaskSpec();
  spec.min_frames_per_token = 0;
  EXPECT_THROW(GenerateSyntheticCorpus(spec, 1), Error);
}

// Multinomial logistic regression by full-batch gradient descent.
TEST(SyntheticCorpus, FramesAreLinearlySeparable) {
  SyntheticTaskSpec spec = SpecWithNoise(0.1);
  Corpus corpus = GenerateSyntheticCorpus(spec, 120);
  const std::size_t d = spec.feature_dim + 1, classes = Tokenizer(spec.alphabet).vocab_size();
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  std::vector<bool> held_out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Utterance& u = corpus[i];
    for (std::size_t t = 0; t < u.features.frames; ++t) {
      std::vector<double> x(d, 1.0);
      for (std::size_t j = 0; j < spec.feature_dim; ++j) x[j] = u.features.at(t, j);
      xs.push_back(std::move(x));
      ys.push_back(u.alignment[t]);
      held_out.push_back(i >= 100);
    }
  }
  std::vector<double> w(classes * d, 0.0), grad(classes * d);
  std::vector<double> p(classes);
  auto predict = [&](const std::vector<double>& x) {
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = 0.0;
      for (std::size_t j = 0; j < d; ++j) p[c] += w[c * d + j] * x[j];
    }
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  };
  for (int iter = 0; iter < 300; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (held_out[i]) continue;
      ++n;
      predict(xs[i]);
      const double m = *std::max_element(p.begin(), p.end());
      double z = 0.0;
      for (double& v : p) z += (v = std::exp(v - m));
      for (std::size_t c = 0; c < classes; ++c) {
        const double g = p[c] / z - (static_cast<int>(c) == ys[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad[c * d + j] += g * xs[i][j];
      }
    }
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= 1.0 * grad[k] / static_cast<double>(n);
  }
  std::size_t right = 0, total = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!held_out[i]) continue;
    ++total;
    if (predict(xs[i]) == ys[i]) ++right;
  }
  const double accuracy = static_cast<double>(right) / static_cast<double>(total);
  EXPECT_GE(accuracy, 0.99) << right << "/" << total;
}

FeatureSequence Ramp(std::size_t frames, std::size_t dim) {
  FeatureSequence x;
  x.frames = frames;
  x.dim = dim;
  for (std::size_t i = 0; i < frames * dim; ++i) x.values.push_back(static_cast<double>(i + 1));
  return x;
}

TEST(StackSuperframes, FilterbankDimensions) {
  FeatureSequence s = StackSuperframes(Ramp(9, 80), 3);
  EXPECT_EQ(s.dim, 240u);
  EXPECT_EQ(s.frames, 3u);
  EXPECT_DOUBLE_EQ(s.frame_shift_ms, 30.0);
}

TEST(StackSuperframes, TailIsZeroPadded) {
  FeatureSequence s = StackSuperframes(Ramp(7, 2), 3);
  ASSERT_EQ(s.frames, 3u);
  EXPECT_EQ(s.values.size(), 18u);
  // Last superframe holds frame 6 then zeros.
  EXPECT_EQ(s.at(2, 0), 13.0);
  EXPECT_EQ(s.at(2, 1), 14.0);
  for (std::size_t j = 2; j < 6; ++j) EXPECT_EQ(s.at(2, j), 0.0);
  EXPECT_EQ(s.at(1, 0), 7.0);
}

TEST(StackSuperframes, ContractsForAllLengths) {
  for (std::size_t t = 1; t <= 12; ++t) {
    for (std::size_t k = 1; k <= 5; ++k) {
      FeatureSequence x = Ramp(t, 3);
      FeatureSequence s = StackSuperframes(x, k);
      EXPECT_EQ(s.frames, (t + k - 1) / k);
      EXPECT_EQ(s.dim, 3 * k);
      s.Validate();
      for (std::size_t i = 0; i < x.values.size(); ++i) EXPECT_EQ(s.values[i], x.values[i]);
    }
  }
  EXPECT_THROW(StackSuperframes(Ramp(3, 2), 0), Error);
}

TEST(StackSuperframes, AlignmentTakesMiddleFrame) {
  std::vector<int> a = {0, 3, 3, 4, 4, 4, 5};
  EXPECT_EQ(DownsampleAlignment(a, 3), (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(DownsampleAlignment(a, 1), a);
}

TEST(FeatureSequence, ValidateRejectsBadPayloads) {
  FeatureSequence x = Ramp(2, 2);
  x.values.pop_back();
  EXPECT_THROW(x.Validate(), Error);
  FeatureSequence empty;
  empty.dim = 2;
  EXPECT_THROW(empty.Validate(), Error);
  FeatureSequence bad = Ramp(1, 1);
  bad.values[0] = std::nan("");
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(Tokenizer, RoundTripsEveryTranscript) {
  SyntheticTaskSpec spec = DefaultTaskSpec();
  Tokenizer tok(spec.alphabet);
  std::set<std::string> texts;
  std::set<TokenSequence> encoded;
  for (const Utterance& u : GenerateSyntheticCorpus(spec, 200)) {
    EXPECT_EQ(tok.Decode(tok.Encode(u.text)), u.text);
    for (int id : u.tokens) EXPECT_GE(id, kFirstLabel);
    texts.insert(u.text);
    encoded.insert(tok.Encode(u.text));
  }
  EXPECT_EQ(texts.size(), encoded.size());
}

TEST(Tokenizer, EmptyAndOutOfVocabulary) {
  Tokenizer tok("abcdefgh ");
  EXPECT_TRUE(tok.Encode("").empty());
  EXPECT_EQ(tok.Decode(TokenSequence{}), "");
  EXPECT_EQ(tok.vocab_size(), 12u);
  EXPECT_THROW(tok.Encode("abz"), Error);
  EXPECT_THROW(tok.Decode(TokenSequence{kEos}), Error);
  EXPECT_THROW(tok.Decode(TokenSequence{12}), Error);
  EXPECT_THROW(Tokenizer("aa"), Error);
}

TEST(CorpusIo, RoundTripIsBitExact) {
  Corpus corpus = GenerateSyntheticCorpus(SpecWithNoise(0.3), 8);
  std::stringstream buf;
  WriteCorpus(buf, corpus);
  Corpus back = ReadCorpus(buf);
  ASSERT_EQ(back.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(back[i].id, corpus[i].id);
    EXPECT_EQ(back[i].text, corpus[i].text);
    EXPECT_EQ(back[i].tokens, corpus[i].tokens);
    EXPECT_EQ(back[i].alignment, corpus[i].alignment);
    EXPECT_EQ(back[i].features.values, corpus[i].features.values);
    EXPECT_EQ(back[i].features.frame_shift_ms, corpus[i].features.frame_shift_ms);
  }
}

TEST(CorpusIo, FileRoundTrip) {
  Corpus corpus = GenerateSyntheticCorpus(DefaultTaskSpec(), 3);
  const std::string path =
      (std::filesystem::temp_directory_path() / "asrlab_data_test.corpus").string();
  WriteCorpusFile(path, corpus);
  Corpus back = ReadCorpusFile(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].features.values, corpus[2].features.values);
  EXPECT_THROW(ReadCorpusFile(path), Error);
}

TEST(CorpusIo, RejectsTruncatedInput) {
  Corpus corpus = GenerateSyntheticCorpus(DefaultTaskSpec(), 2);
  std::stringstream buf;
  WriteCorpus(buf, corpus);
  std::string bytes = buf.str();
  std::stringstream cut(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(ReadCorpus(cut), Error);
}

TEST(AlignmentIo, RunLengthRoundTrip) {
  std::vector<int> a = {0, 0, 3, 3, 3, 4, 0};
  auto runs = RunLengths(a);
  EXPECT_EQ(runs.size(), 4u);
  EXPECT_EQ(ExpandRuns(runs), a);
  std::stringstream buf;
  WriteAlignments(buf, {"u1", "u2"}, {a, {5}});
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "u1 0 2 3 3 4 1 0 1");
  auto back = ReadAlignments(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].first, "u1");
  EXPECT_EQ(back[0].second, a);
  EXPECT_EQ(back[1].second, std::vector<int>{5});
}

}  // namespace
}  // namespace asrlab
