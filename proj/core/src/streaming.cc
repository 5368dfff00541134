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
#include "asrlab/streaming.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace asrlab {

namespace {

Mask WindowMask(std::size_t frames, int lookahead) {
  Mask m(frames * frames, 0);
  for (std::size_t q = 0; q < frames; ++q) {
    const std::size_t last = std::min(frames - 1, q + static_cast<std::size_t>(lookahead));
    for (std::size_t k = 0; k <= last; ++k) m[q * frames + k] = 1;
  }
  return m;
}

Tensor PerturbRows(const Tensor& x, std::size_t begin, std::size_t end, double delta) {
  Tensor y = x.Detach();
  auto v = y.mutable_values();
  const std::size_t d = x.cols();
  for (std::size_t r = begin; r < std::min(end, x.rows()); ++r)
    for (std::size_t j = 0; j < d; ++j) v[r * d + j] += delta;
  return y;
}

bool RowChanged(const Tensor& a, const Tensor& b, std::size_t t) {
  const std::size_t d = a.cols();
  for (std::size_t j = 0; j < d; ++j) {
    if (std::abs(a.values()[t * d + j] - b.values()[t * d + j]) > 1e-9) return true;
  }
  return false;
}

}  // namespace

int AttentionMask::FrameLookahead(std::size_t t) const {
  // Propagate the reachable set through the stack from the top down.
  std::vector<std::uint8_t> reach(frames, 0);
  reach[t] = 1;
  for (std::size_t b = blocks.size(); b-- > 0;) {
    std::vector<std::uint8_t> next(frames, 0);
    for (std::size_t q = 0; q < frames; ++q) {
      if (!reach[q]) continue;
      next[q] = 1;
      for (std::size_t k = 0; k < frames; ++k)
        if (blocks[b][q * frames + k]) next[k] = 1;
    }
    reach = std::move(next);
  }
  int far = 0;
  for (std::size_t k = t; k < frames; ++k)
    if (reach[k]) far = static_cast<int>(k - t);
  return far;
}

AttentionMask BuildFullMask(std::size_t frames, std::size_t blocks) {
  if (frames == 0) throw Error("mask: need at least one frame");
  AttentionMask m;
  m.kind = MaskKind::kFull;
  m.frames = frames;
  m.blocks.assign(blocks, Mask(frames * frames, 1));
  return m;
}

AttentionMask BuildLookaheadMask(std::size_t frames, std::size_t blocks, int per_block) {
  return BuildLookaheadMask(frames, std::vector<int>(blocks, per_block));
}

AttentionMask BuildLookaheadMask(std::size_t frames, std::vector<int> per_block) {
  if (frames == 0) throw Error("mask: need at least one frame");
  AttentionMask m;
  m.kind = MaskKind::kLookahead;
  m.frames = frames;
  for (int l : per_block) {
    if (l < 0) throw Error("mask: negative lookahead");
    m.blocks.push_back(WindowMask(frames, l));
  }
  m.per_block_lookahead = std::move(per_block);
  return m;
}

AttentionMask BuildChunkMask(std::size_t frames, std::size_t blocks, std::size_t chunk_frames) {
  if (frames == 0) throw Error("mask: need at least one frame");
  if (chunk_frames == 0) throw Error("mask: chunk length must be >= 1");
  AttentionMask m;
  m.kind = MaskKind::kChunk;
  m.frames = frames;
  m.chunk_frames = chunk_frames;
  Mask rel(frames * frames, 0);
  for (std::size_t q = 0; q < frames; ++q) {
    const std::size_t end = std::min(frames, (q / chunk_frames + 1) * chunk_frames);
    for (std::size_t k = 0; k < end; ++k) rel[q * frames + k] = 1;
  }
  m.blocks.assign(blocks, rel);
  return m;
}

Mask CausalMask(std::size_t n) { return WindowMask(n, 0); }

Mask PrefixMask(std::size_t queries, std::size_t keys, std::size_t visible) {
  if (visible == 0 || visible > keys) throw Error("mask: visible prefix out of range");
  Mask m(queries * keys, 0);
  for (std::size_t q = 0; q < queries; ++q)
    for (std::size_t k = 0; k < visible; ++k) m[q * keys + k] = 1;
  return m;
}

void LatencySpec::Validate() const {
  if (frontend_stride < 1 || input_frame_shift_ms < 1) {
    throw Error("latency spec '" + name + "': stride and frame shift must be positive");
  }
  if (decoder_window_frames < 0 || chunk_right_context < 0) {
    throw Error("latency spec '" + name + "': negative frame count");
  }
  for (int l : per_block_lookahead) {
    if (l < 0) throw Error("latency spec '" + name + "': negative lookahead");
  }
  if (kind == LatencyKind::kChunk && chunk_frames < 1) {
    throw Error("latency spec '" + name + "': chunk length must be >= 1");
  }
}

LatencyReport EncoderLatencyMs(const LatencySpec& spec) {
  spec.Validate();
  LatencyReport r;
  const long frame_ms = spec.encoder_frame_ms();
  r.decoder_extra_ms = static_cast<long>(spec.decoder_window_frames) * frame_ms;
  switch (spec.kind) {
    case LatencyKind::kFullUtterance:
      r.full_utterance = true;
      break;
    case LatencyKind::kLookahead: {
      r.lookahead_frames =
          std::accumulate(spec.per_block_lookahead.begin(), spec.per_block_lookahead.end(), 0);
      r.min_ms = r.max_ms = r.lookahead_frames * frame_ms;
      r.avg_ms = static_cast<double>(r.max_ms);
      break;
    }
    case LatencyKind::kChunk: {
      r.lookahead_frames = spec.chunk_frames - 1 + spec.chunk_right_context;
      r.min_ms = spec.chunk_right_context * frame_ms;
      r.max_ms = (spec.chunk_frames + spec.chunk_right_context) * frame_ms;
      r.avg_ms = 0.5 * static_cast<double>(r.min_ms + r.max_ms);
      break;
    }
  }
  r.total_ms = r.max_ms + r.decoder_extra_ms;
  return r;
}

std::string LatencyTableTsv(const std::vector<LatencySpec>& specs) {
  std::ostringstream os;
  os << "architecture\tlookahead_frames\tencoder_ms\tavg_ms\tmin_ms\tmax_ms\tdecoder_extra_ms"
        "\ttotal_ms\n";
  for (const LatencySpec& s : specs) {
    LatencyReport r = EncoderLatencyMs(s);
    os << s.name << '\t';
    if (r.full_utterance) {
      os << "full\tfull\tfull\tfull\tfull\t" << r.decoder_extra_ms << "\tfull\n";
      continue;
    }
    os << r.lookahead_frames << '\t' << r.max_ms << '\t' << r.avg_ms << '\t' << r.min_ms
       << '\t' << r.max_ms << '\t' << r.decoder_extra_ms << '\t' << r.total_ms << '\n';
  }
  return os.str();
}

std::vector<LatencySpec> ReferenceLatencySpecs() {
  std::vector<LatencySpec> specs;
  LatencySpec rnnt;
  rnnt.name = "rnnt_lstm";
  rnnt.kind = LatencyKind::kLookahead;
  rnnt.per_block_lookahead.assign(6, 0);
  rnnt.frontend_stride = 3;
  specs.push_back(rnnt);

  LatencySpec context = rnnt;
  context.name = "rnnt_lstm_context";
  context.per_block_lookahead.assign(6, 4);
  specs.push_back(context);

  LatencySpec top = rnnt;
  top.name = "rnnt_lstm_top_layer_lookahead";
  top.per_block_lookahead = {0, 0, 0, 0, 0, 24};
  specs.push_back(top);

  LatencySpec aed = context;
  aed.name = "rnn_aed_mocha_context";
  specs.push_back(aed);

  LatencySpec lookahead;
  lookahead.name = "transformer_aed_lookahead";
  lookahead.kind = LatencyKind::kLookahead;
  lookahead.per_block_lookahead.assign(18, 1);
  lookahead.frontend_stride = 4;
  lookahead.decoder_window_frames = 6;
  specs.push_back(lookahead);

  LatencySpec chunk;
  chunk.name = "transformer_aed_chunk";
  chunk.kind = LatencyKind::kChunk;
  chunk.chunk_frames = 12;
  chunk.chunk_right_context = 12;
  chunk.frontend_stride = 4;
  specs.push_back(chunk);
  return specs;
}

bool CausalityProbe(const SequenceFunction& encoder, const Tensor& x, std::size_t t,
                    std::size_t perturb_at, std::size_t input_stride, double delta) {
  if (input_stride == 0) throw Error("causality probe: zero stride");
  const std::size_t groups = (x.rows() + input_stride - 1) / input_stride;
  if (perturb_at >= groups) throw Error("causality probe: perturbation frame out of range");
  Tensor base = encoder(x);
  if (t >= base.rows()) throw Error("causality probe: output frame out of range");
  Tensor moved = encoder(PerturbRows(x, perturb_at * input_stride,
                                     (perturb_at + 1) * input_stride, delta));
  return RowChanged(base, moved, t);
}

std::vector<int> MeasureFutureDependence(const SequenceFunction& encoder, const Tensor& x,
                                         std::size_t input_stride, double delta) {
  if (input_stride == 0) throw Error("causality probe: zero stride");
  Tensor base = encoder(x);
  const std::size_t groups = (x.rows() + input_stride - 1) / input_stride;
  std::vector<int> far(base.rows(), 0);
  for (std::size_t p = 0; p < groups; ++p) {
    Tensor moved =
        encoder(PerturbRows(x, p * input_stride, (p + 1) * input_stride, delta));
    for (std::size_t t = 0; t < base.rows() && t <= p; ++t) {
      if (RowChanged(base, moved, t)) far[t] = std::max(far[t], static_cast<int>(p - t));
    }
  }
  return far;
}

}  // namespace asrlab
