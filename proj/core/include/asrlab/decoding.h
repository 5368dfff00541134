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
// Decoders: frame-synchronous transducer search, label-synchronous
// CTC/attention beam search, triggered attention, hard MoChA, and error
// counting.
//
// Every search is deterministic. Equal scores are ordered by shorter token
// sequence first, then lexicographically by token id.

#ifndef ASRLAB_DECODING_H_
#define ASRLAB_DECODING_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asrlab/data.h"
#include "asrlab/rnn_aed.h"
#include "asrlab/rnnt.h"
#include "asrlab/transformer_aed.h"

namespace asrlab {

struct Hypothesis {
  TokenSequence tokens;
  // Ranking score; for joint decoding ctc_score + beta1 * attention_score.
  double score = 0.0;
  double ctc_score = 0.0;
  double attention_score = 0.0;
  double transducer_score = 0.0;
  // Trigger frame (triggered attention) or boundary frame (hard MoChA, -1
  // when no boundary fired) per token.
  std::vector<int> frames;
};

// Strict "ranks before" relation implementing the tie-breaking rule.
bool RanksBefore(const Hypothesis& a, const Hypothesis& b);

// ---- Transducer search ----

struct TransducerDecodeConfig {
  std::size_t beam = 4;
  // Labels a hypothesis may emit on one frame.
  std::size_t max_symbols_per_frame = 10;
  // Total labels per hypothesis; 0 means unlimited.
  std::size_t max_length = 0;
};

// Joint log-probabilities (vocab entries, index 0 = blank) at frame t after
// emitting `prefix`.
using TransducerJoint =
    std::function<std::vector<double>(std::size_t t, const TokenSequence& prefix)>;

// Frame-synchronous search. At every frame each live hypothesis proposes a
// blank (finishing the frame) or a label (staying on the frame); the union
// of proposals and already finished hypotheses is cut to the beam. Finished
// hypotheses with equal label sequences are merged by log-sum-exp. With
// beam 1 this is greedy decoding; with a beam covering every proposal it
// returns the exact most probable label sequence.
Hypothesis TransducerBeamSearch(std::size_t frames, std::size_t vocab,
                                const TransducerJoint& joint,
                                const TransducerDecodeConfig& config);
// Per frame: emit argmax labels until blank is the argmax.
Hypothesis TransducerGreedySearch(std::size_t frames, std::size_t vocab,
                                  const TransducerJoint& joint,
                                  const TransducerDecodeConfig& config);

Hypothesis RnntBeamDecode(const RnntModel& model, const Tensor& x,
                          const TransducerDecodeConfig& config);
Hypothesis RnntGreedyDecode(const RnntModel& model, const Tensor& x,
                            const TransducerDecodeConfig& config = {});

// ---- CTC prefix scoring ----

// Prefix probabilities over a frames x vocab log-probability matrix (blank 0).
class CtcPrefixScorer {
 public:
  struct State {
    int last = -1;
    std::vector<double> r_nonblank;  // prefix emitted, ending in its last label
    std::vector<double> r_blank;     // prefix emitted, ending in blank
    // cumulative[t]: log P(prefix is emitted within frames 0..t).
    std::vector<double> cumulative;
  };

  CtcPrefixScorer(std::span<const double> log_probs, std::size_t frames, std::size_t vocab);
  explicit CtcPrefixScorer(const Tensor& log_probs);

  State Initial() const;
  State Extend(const State& state, int label) const;
  // log P(prefix is the start of the labelling) using the first `visible`
  // frames (0 = all).
  double PrefixScore(const State& state, std::size_t visible = 0) const;
  // log P(labelling == prefix) using the first `visible` frames (0 = all).
  double FullScore(const State& state, std::size_t visible = 0) const;
  std::size_t frames() const { return frames_; }

 private:
  std::size_t Limit(std::size_t visible) const;
  std::vector<double> lp_;
  std::size_t frames_;
  std::size_t vocab_;
};

// ---- Label-synchronous joint decoding ----

struct JointDecodeConfig {
  double beta1 = 0.3;
  std::size_t beam = 4;
  // Attention proposals per hypothesis and step.
  std::size_t top_k = 4;
  // Label limit; 0 means the number of encoder frames.
  std::size_t max_length = 0;
  void Validate(std::size_t vocab) const;
};

// Next-token log-probabilities (vocab entries) after `prefix`.
using NextTokenScorer = std::function<std::vector<double>(const TokenSequence& prefix)>;

// Beam search where the attention model proposes its top-k next tokens and
// candidates are ranked by log p_ctc(prefix) + beta1 * log p_att(prefix). A
// hypothesis ending in end-of-sequence is scored with the full CTC
// probability and moved to the completed pool; search stops once no live
// hypothesis outscores the best completed one. Without a CTC head
// (`ctc_log_probs` undefined) the ranking is the attention score alone.
// Returns completed hypotheses, best first.
std::vector<Hypothesis> JointBeamSearch(const Tensor& ctc_log_probs,
                                        const NextTokenScorer& attention, std::size_t vocab,
                                        std::size_t frames, const JointDecodeConfig& config);

std::vector<Hypothesis> AttentionBeamDecode(const TransformerAedModel& model, const Tensor& x,
                                            const JointDecodeConfig& config);
// Attention-only beam search for the LSTM attention model (soft attention).
std::vector<Hypothesis> AttentionBeamDecode(const RnnAedModel& model, const Tensor& x,
                                            const JointDecodeConfig& config);

// Frames where the greedy CTC label changes to a new non-blank label.
std::vector<int> CtcTriggerFrames(const Tensor& ctc_log_probs);

// Streaming decode: each trigger releases the attention decoder over the
// encoder frames visible at that frame; its top-k proposals are re-ranked
// with the CTC prefix score over the same frames. Emits one token per
// trigger; the final ranking adds end-of-sequence with the whole utterance.
Hypothesis TriggeredAttentionDecode(const TransformerAedModel& model, const Tensor& x,
                                    const JointDecodeConfig& config);

// Hard monotonic decoding: selection probabilities are thresholded at 0.5
// and attention is a softmax over the window ending at the boundary.
Hypothesis MochaHardDecode(const RnnAedModel& model, const Tensor& x, std::size_t beam,
                           std::size_t max_length = 0);

// ---- Error counting ----

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;
  std::size_t errors() const { return substitutions + deletions + insertions; }
  double rate() const;
  ErrorCounts& operator+=(const ErrorCounts& o);
};

// Minimum-edit alignment counts between two symbol sequences.
template <typename T>
ErrorCounts AlignmentErrors(std::span<const T> hyp, std::span<const T> ref);

// Word error rate counts; an empty reference is an error.
ErrorCounts WordErrorRate(std::span<const std::string> hyp, std::span<const std::string> ref);
ErrorCounts WordErrorRate(const std::string& hyp, const std::string& ref);
ErrorCounts TokenErrors(std::span<const int> hyp, std::span<const int> ref);

}  // namespace asrlab

#endif  // ASRLAB_DECODING_H_
