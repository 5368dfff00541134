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
#include "asrlab/decoding.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "asrlab/losses.h"
#include "asrlab/ops.h"

namespace asrlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Entry {
  Hypothesis hyp;
  bool live = false;
};

void SortHypotheses(std::vector<Hypothesis>& hyps) {
  std::sort(hyps.begin(), hyps.end(), RanksBefore);
}

std::vector<double> LastRow(const Tensor& t) {
  const std::size_t n = t.cols();
  auto v = t.values();
  return {v.end() - static_cast<std::ptrdiff_t>(n), v.end()};
}

// Payload labels plus end-of-sequence ordered by score (ties by id), cut to k.
std::vector<int> TopCandidates(const std::vector<double>& lp, std::size_t k, bool with_eos) {
  std::vector<int> ids;
  if (with_eos) ids.push_back(kEos);
  for (int c = kFirstLabel; c < static_cast<int>(lp.size()); ++c) ids.push_back(c);
  std::stable_sort(ids.begin(), ids.end(), [&lp](int a, int b) {
    if (lp[a] != lp[b]) return lp[a] > lp[b];
    return a < b;
  });
  if (ids.size() > k) ids.resize(k);
  return ids;
}

}  // namespace

bool RanksBefore(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
  return a.tokens < b.tokens;
}

// ---- Transducer search ----

Hypothesis TransducerBeamSearch(std::size_t frames, std::size_t vocab,
                                const TransducerJoint& joint,
                                const TransducerDecodeConfig& config) {
  if (config.beam == 0) throw Error("transducer search: beam must be >= 1");
  if (frames == 0) throw Error("transducer search: no frames");
  std::vector<Hypothesis> finished{Hypothesis{}};
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<Hypothesis> live = std::move(finished);
    finished.clear();
    std::map<TokenSequence, std::size_t> index;  // tokens -> position in finished
    for (std::size_t e = 0; !live.empty(); ++e) {
      std::vector<Hypothesis> proposals;
      for (const Hypothesis& h : live) {
        const std::vector<double> lp = joint(t, h.tokens);
        if (lp.size() != vocab) throw Error("transducer search: joint size mismatch");
        const double blank_score = h.score + lp[kBlank];
        auto it = index.find(h.tokens);
        if (it == index.end()) {
          index[h.tokens] = finished.size();
          Hypothesis f = h;
          f.score = blank_score;
          finished.push_back(std::move(f));
        } else {
          finished[it->second].score = LogAddExp(finished[it->second].score, blank_score);
        }
        const bool may_emit = e < config.max_symbols_per_frame &&
                              (config.max_length == 0 || h.tokens.size() < config.max_length);
        if (!may_emit) continue;
        for (int k = kFirstLabel; k < static_cast<int>(vocab); ++k) {
          Hypothesis p = h;
          p.tokens.push_back(k);
          p.score = h.score + lp[k];
          proposals.push_back(std::move(p));
        }
      }
      std::vector<Entry> pool;
      for (Hypothesis& f : finished) pool.push_back({std::move(f), false});
      for (Hypothesis& p : proposals) pool.push_back({std::move(p), true});
      std::sort(pool.begin(), pool.end(),
                [](const Entry& a, const Entry& b) { return RanksBefore(a.hyp, b.hyp); });
      if (pool.size() > config.beam) pool.resize(config.beam);
      finished.clear();
      index.clear();
      live.clear();
      for (Entry& en : pool) {
        if (en.live) {
          live.push_back(std::move(en.hyp));
        } else {
          index[en.hyp.tokens] = finished.size();
          finished.push_back(std::move(en.hyp));
        }
      }
    }
  }
  SortHypotheses(finished);
  Hypothesis best = finished.front();
  best.transducer_score = best.score;
  return best;
}

Hypothesis TransducerGreedySearch(std::size_t frames, std::size_t vocab,
                                  const TransducerJoint& joint,
                                  const TransducerDecodeConfig& config) {
  if (frames == 0) throw Error("transducer search: no frames");
  Hypothesis h;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t e = 0;; ++e) {
      const std::vector<double> lp = joint(t, h.tokens);
      if (lp.size() != vocab) throw Error("transducer search: joint size mismatch");
      int best = kBlank;
      const bool may_emit = e < config.max_symbols_per_frame &&
                            (config.max_length == 0 || h.tokens.size() < config.max_length);
      if (may_emit) {
        for (int k = kFirstLabel; k < static_cast<int>(vocab); ++k)
          if (lp[k] > lp[best]) best = k;
      }
      h.score += lp[best];
      if (best == kBlank) break;
      h.tokens.push_back(best);
    }
  }
  h.transducer_score = h.score;
  return h;
}

namespace {

TransducerJoint ModelJoint(const RnntModel& model, const Tensor& projected,
                           std::map<TokenSequence, PredictionState>& cache) {
  return [&model, &projected, &cache](std::size_t t, const TokenSequence& prefix) {
    auto it = cache.find(prefix);
    if (it == cache.end()) {
      PredictionState state;
      if (prefix.empty()) {
        state = model.InitialPrediction();
      } else {
        TokenSequence parent(prefix.begin(), prefix.end() - 1);
        // Parents are always queried before their children.
        state = model.ExtendPrediction(cache.at(parent), prefix.back());
      }
      it = cache.emplace(prefix, std::move(state)).first;
    }
    return model.JointStep(projected, t, it->second);
  };
}

}  // namespace

Hypothesis RnntBeamDecode(const RnntModel& model, const Tensor& x,
                          const TransducerDecodeConfig& config) {
  Tensor projected = model.ProjectEncoder(model.Encode(x));
  std::map<TokenSequence, PredictionState> cache;
  return TransducerBeamSearch(projected.rows(), model.vocab_size(),
                              ModelJoint(model, projected, cache), config);
}

Hypothesis RnntGreedyDecode(const RnntModel& model, const Tensor& x,
                            const TransducerDecodeConfig& config) {
  Tensor projected = model.ProjectEncoder(model.Encode(x));
  std::map<TokenSequence, PredictionState> cache;
  return TransducerGreedySearch(projected.rows(), model.vocab_size(),
                                ModelJoint(model, projected, cache), config);
}

// ---- CTC prefix scoring ----

CtcPrefixScorer::CtcPrefixScorer(std::span<const double> log_probs, std::size_t frames,
                                 std::size_t vocab)
    : lp_(log_probs.begin(), log_probs.end()), frames_(frames), vocab_(vocab) {
  if (frames == 0 || vocab == 0 || log_probs.size() != frames * vocab) {
    throw Error("ctc prefix scorer: bad log-probability matrix");
  }
}

CtcPrefixScorer::CtcPrefixScorer(const Tensor& log_probs)
    : CtcPrefixScorer(log_probs.values(), log_probs.rows(), log_probs.cols()) {}

std::size_t CtcPrefixScorer::Limit(std::size_t visible) const {
  if (visible > frames_) throw Error("ctc prefix scorer: visible frames out of range");
  return visible == 0 ? frames_ : visible;
}

CtcPrefixScorer::State CtcPrefixScorer::Initial() const {
  State s;
  s.r_nonblank.assign(frames_, kNegInf);
  s.r_blank.resize(frames_);
  double acc = 0.0;
  for (std::size_t t = 0; t < frames_; ++t) {
    acc += lp_[t * vocab_ + kBlank];
    s.r_blank[t] = acc;
  }
  s.cumulative.assign(frames_, 0.0);
  return s;
}

CtcPrefixScorer::State CtcPrefixScorer::Extend(const State& g, int c) const {
  if (c == kBlank || c < 0 || static_cast<std::size_t>(c) >= vocab_) {
    throw Error("ctc prefix scorer: cannot extend with id " + std::to_string(c));
  }
  State h;
  h.last = c;
  h.r_nonblank.resize(frames_);
  h.r_blank.resize(frames_);
  h.cumulative.resize(frames_);
  const bool empty = g.last < 0;
  h.r_nonblank[0] = empty ? lp_[c] : kNegInf;
  h.r_blank[0] = kNegInf;
  h.cumulative[0] = h.r_nonblank[0];
  for (std::size_t t = 1; t < frames_; ++t) {
    const double phi =
        LogAddExp(g.r_blank[t - 1], c == g.last ? kNegInf : g.r_nonblank[t - 1]);
    const double emit = lp_[t * vocab_ + c];
    h.r_nonblank[t] = LogAddExp(h.r_nonblank[t - 1], phi) + emit;
    h.r_blank[t] = LogAddExp(h.r_blank[t - 1], h.r_nonblank[t - 1]) + lp_[t * vocab_ + kBlank];
    h.cumulative[t] = LogAddExp(h.cumulative[t - 1], phi + emit);
  }
  return h;
}

double CtcPrefixScorer::PrefixScore(const State& state, std::size_t visible) const {
  return state.cumulative[Limit(visible) - 1];
}

double CtcPrefixScorer::FullScore(const State& state, std::size_t visible) const {
  const std::size_t l = Limit(visible);
  return LogAddExp(state.r_nonblank[l - 1], state.r_blank[l - 1]);
}

// ---- Label-synchronous joint decoding ----

void JointDecodeConfig::Validate(std::size_t vocab) const {
  if (beam == 0) throw Error("joint decode: beam must be >= 1");
  if (top_k == 0 || top_k > vocab) {
    throw Error("joint decode: top-k must lie in [1, " + std::to_string(vocab) + "]");
  }
  if (!(beta1 >= 0.0) || !std::isfinite(beta1)) {
    throw Error("joint decode: beta1 must be finite and non-negative");
  }
}

std::vector<Hypothesis> JointBeamSearch(const Tensor& ctc_log_probs,
                                        const NextTokenScorer& attention, std::size_t vocab,
                                        std::size_t frames, const JointDecodeConfig& config) {
  config.Validate(vocab);
  const bool with_ctc = ctc_log_probs.defined();
  std::optional<CtcPrefixScorer> ctc;
  if (with_ctc) {
    ctc.emplace(ctc_log_probs);
    if (ctc_log_probs.cols() != vocab) throw Error("joint decode: CTC vocabulary mismatch");
  }
  const std::size_t max_length = config.max_length ? config.max_length : frames;
  auto combine = [&](double c, double a) { return with_ctc ? c + config.beta1 * a : a; };

  struct Live {
    Hypothesis hyp;
    CtcPrefixScorer::State state;
  };
  std::vector<Live> live(1);
  if (with_ctc) live[0].state = ctc->Initial();
  std::vector<Hypothesis> completed;
  for (std::size_t len = 0; !live.empty(); ++len) {
    std::vector<Live> next;
    for (const Live& l : live) {
      const std::vector<double> lp = attention(l.hyp.tokens);
      if (lp.size() != vocab) throw Error("joint decode: attention size mismatch");
      std::vector<int> cands = len < max_length ? TopCandidates(lp, config.top_k, true)
                                                : std::vector<int>{kEos};
      for (int c : cands) {
        Hypothesis h = l.hyp;
        h.attention_score += lp[c];
        if (c == kEos) {
          h.ctc_score = with_ctc ? ctc->FullScore(l.state) : 0.0;
          h.score = combine(h.ctc_score, h.attention_score);
          if (h.score > kNegInf) completed.push_back(std::move(h));
          continue;
        }
        Live n;
        n.hyp = std::move(h);
        n.hyp.tokens.push_back(c);
        if (with_ctc) {
          n.state = ctc->Extend(l.state, c);
          n.hyp.ctc_score = ctc->PrefixScore(n.state);
        }
        n.hyp.score = combine(n.hyp.ctc_score, n.hyp.attention_score);
        if (n.hyp.score > kNegInf) next.push_back(std::move(n));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Live& a, const Live& b) { return RanksBefore(a.hyp, b.hyp); });
    if (next.size() > config.beam) next.resize(config.beam);
    live = std::move(next);
    if (!completed.empty() && !live.empty()) {
      const double best_done =
          std::max_element(completed.begin(), completed.end(),
                           [](const Hypothesis& a, const Hypothesis& b) {
                             return a.score < b.score;
                           })->score;
      // Both score terms only decrease as a hypothesis grows.
      if (live.front().hyp.score <= best_done) break;
    }
  }
  SortHypotheses(completed);
  return completed;
}

std::vector<Hypothesis> AttentionBeamDecode(const TransformerAedModel& model, const Tensor& x,
                                            const JointDecodeConfig& config) {
  Tensor enc = model.Encode(x);
  Tensor ctc = model.CtcLogProbs(enc);
  NextTokenScorer att = [&](const TokenSequence& prefix) {
    return LastRow(model.DecoderLogProbs(enc, prefix, enc.rows()));
  };
  return JointBeamSearch(ctc, att, model.vocab_size(), enc.rows(), config);
}

std::vector<Hypothesis> AttentionBeamDecode(const RnnAedModel& model, const Tensor& x,
                                            const JointDecodeConfig& config) {
  AedMemory memory = model.Prepare(model.Encode(x));
  // State after consuming each prefix, plus the distribution it predicts.
  std::map<TokenSequence, AedStep> cache;
  std::function<const AedStep&(const TokenSequence&)> step_for =
      [&](const TokenSequence& prefix) -> const AedStep& {
    auto it = cache.find(prefix);
    if (it != cache.end()) return it->second;
    AedStep step;
    if (prefix.empty()) {
      step = model.Step(memory, model.InitialState(memory), kSos);
    } else {
      TokenSequence parent(prefix.begin(), prefix.end() - 1);
      step = model.Step(memory, step_for(parent).state, prefix.back());
    }
    return cache.emplace(prefix, std::move(step)).first->second;
  };
  NextTokenScorer att = [&](const TokenSequence& prefix) {
    return LastRow(step_for(prefix).log_probs);
  };
  const std::size_t max_length = config.max_length ? config.max_length : memory.frames();
  JointDecodeConfig c = config;
  c.max_length = max_length;
  return JointBeamSearch(Tensor(), att, model.vocab_size(), memory.frames(), c);
}

std::vector<int> CtcTriggerFrames(const Tensor& ctc_log_probs) {
  std::vector<int> triggers;
  const std::size_t v = ctc_log_probs.cols();
  auto lp = ctc_log_probs.values();
  int prev = kBlank;
  for (std::size_t t = 0; t < ctc_log_probs.rows(); ++t) {
    int best = 0;
    for (std::size_t k = 1; k < v; ++k)
      if (lp[t * v + k] > lp[t * v + best]) best = static_cast<int>(k);
    if (best >= kFirstLabel && best != prev) triggers.push_back(static_cast<int>(t));
    prev = best;
  }
  return triggers;
}

Hypothesis TriggeredAttentionDecode(const TransformerAedModel& model, const Tensor& x,
                                    const JointDecodeConfig& config) {
  config.Validate(model.vocab_size());
  Tensor enc = model.Encode(x);
  Tensor ctc_lp = model.CtcLogProbs(enc);
  CtcPrefixScorer ctc(ctc_lp);
  const std::size_t frames = enc.rows();
  struct Live {
    Hypothesis hyp;
    CtcPrefixScorer::State state;
  };
  std::vector<Live> beam(1);
  beam[0].state = ctc.Initial();
  for (int trigger : CtcTriggerFrames(ctc_lp)) {
    const std::size_t visible = model.VisibleFrames(static_cast<std::size_t>(trigger), frames);
    std::vector<Live> next;
    for (const Live& l : beam) {
      const std::vector<double> lp = LastRow(model.DecoderLogProbs(enc, l.hyp.tokens, visible));
      for (int c : TopCandidates(lp, config.top_k, false)) {
        Live n;
        n.hyp = l.hyp;
        n.hyp.tokens.push_back(c);
        n.hyp.frames.push_back(trigger);
        n.hyp.attention_score += lp[c];
        n.state = ctc.Extend(l.state, c);
        n.hyp.ctc_score = ctc.PrefixScore(n.state, visible);
        n.hyp.score = n.hyp.ctc_score + config.beta1 * n.hyp.attention_score;
        next.push_back(std::move(n));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Live& a, const Live& b) { return RanksBefore(a.hyp, b.hyp); });
    if (next.size() > config.beam) next.resize(config.beam);
    beam = std::move(next);
  }
  std::vector<Hypothesis> done;
  for (Live& l : beam) {
    Hypothesis h = std::move(l.hyp);
    h.attention_score += LastRow(model.DecoderLogProbs(enc, h.tokens, frames))[kEos];
    h.ctc_score = ctc.FullScore(l.state);
    h.score = h.ctc_score + config.beta1 * h.attention_score;
    done.push_back(std::move(h));
  }
  SortHypotheses(done);
  return done.front();
}

Hypothesis MochaHardDecode(const RnnAedModel& model, const Tensor& x, std::size_t beam,
                           std::size_t max_length) {
  if (beam == 0) throw Error("mocha decode: beam must be >= 1");
  if (model.config().attention != AttentionKind::kMocha) {
    throw Error("mocha decode: model does not use MoChA");
  }
  AedMemory memory = model.Prepare(model.Encode(x));
  if (max_length == 0) max_length = memory.frames();
  struct Live {
    Hypothesis hyp;
    AedDecoderState state;
    int prev = kSos;
  };
  std::vector<Live> live(1);
  live[0].state = model.InitialState(memory);
  std::vector<Hypothesis> completed;
  for (std::size_t len = 0; !live.empty(); ++len) {
    std::vector<Live> next;
    for (const Live& l : live) {
      AedStep step = model.Step(memory, l.state, l.prev, true);
      const std::vector<double> lp = LastRow(step.log_probs);
      std::vector<int> cands = len < max_length ? TopCandidates(lp, lp.size(), true)
                                                : std::vector<int>{kEos};
      for (int c : cands) {
        Live n;
        n.hyp = l.hyp;
        n.hyp.attention_score += lp[c];
        n.hyp.score = n.hyp.attention_score;
        if (c == kEos) {
          completed.push_back(std::move(n.hyp));
          continue;
        }
        n.hyp.tokens.push_back(c);
        n.hyp.frames.push_back(step.hard_boundary);
        n.state = step.state;
        n.prev = c;
        next.push_back(std::move(n));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Live& a, const Live& b) { return RanksBefore(a.hyp, b.hyp); });
    if (next.size() > beam) next.resize(beam);
    live = std::move(next);
    if (!completed.empty() && !live.empty()) {
      double best_done = kNegInf;
      for (const Hypothesis& h : completed) best_done = std::max(best_done, h.score);
      if (live.front().hyp.score <= best_done) break;
    }
  }
  SortHypotheses(completed);
  return completed.front();
}

// ---- Error counting ----

double ErrorCounts::rate() const {
  if (reference_length == 0) throw Error("error rate: empty reference");
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  reference_length += o.reference_length;
  return *this;
}

template <typename T>
ErrorCounts AlignmentErrors(std::span<const T> hyp, std::span<const T> ref) {
  const std::size_t n = ref.size(), m = hyp.size();
  struct Cell {
    std::size_t cost, s, d, i;
  };
  std::vector<Cell> row(m + 1), prev(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, 0, 0, j};
  for (std::size_t i = 1; i <= n; ++i) {
    row[0] = {i, 0, i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = ref[i - 1] == hyp[j - 1];
      Cell diag = prev[j - 1];
      diag.cost += same ? 0 : 1;
      diag.s += same ? 0 : 1;
      Cell del = prev[j];
      ++del.cost;
      ++del.d;
      Cell ins = row[j - 1];
      ++ins.cost;
      ++ins.i;
      Cell best = diag;
      if (del.cost < best.cost) best = del;
      if (ins.cost < best.cost) best = ins;
      row[j] = best;
    }
    std::swap(row, prev);
  }
  ErrorCounts e;
  e.substitutions = prev[m].s;
  e.deletions = prev[m].d;
  e.insertions = prev[m].i;
  e.reference_length = n;
  return e;
}

template ErrorCounts AlignmentErrors<int>(std::span<const int>, std::span<const int>);
template ErrorCounts AlignmentErrors<std::string>(std::span<const std::string>,
                                                  std::span<const std::string>);

ErrorCounts WordErrorRate(std::span<const std::string> hyp, std::span<const std::string> ref) {
  if (ref.empty()) throw Error("word error rate: empty reference");
  return AlignmentErrors<std::string>(hyp, ref);
}

ErrorCounts WordErrorRate(const std::string& hyp, const std::string& ref) {
  const std::vector<std::string> h = SplitWords(hyp), r = SplitWords(ref);
  return WordErrorRate(std::span<const std::string>(h), std::span<const std::string>(r));
}

ErrorCounts TokenErrors(std::span<const int> hyp, std::span<const int> ref) {
  return AlignmentErrors<int>(hyp, ref);
}

}  // namespace asrlab
