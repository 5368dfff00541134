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
#include "asrlab/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace asrlab {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void Bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error("config: bad value '" + value + "' for '" + key + "': " + why);
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
    Bad(key, v, "expected a non-negative integer");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double out = 0.0;
  is >> out;
  if (!is || !is.eof()) Bad(key, v, "expected a number");
  return out;
}

std::vector<int> ParseIntList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    const std::uint64_t n = ParseUnsigned(key, item);
    if (n > 100000) Bad(key, v, "value too large");
    out.push_back(static_cast<int>(n));
  }
  if (out.empty()) Bad(key, v, "expected a comma-separated list");
  return out;
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string FormatList(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

template <typename E, std::size_t N>
E ParseEnum(const std::string& key, const std::string& v, const EnumName<E> (&names)[N]) {
  std::string allowed;
  for (const auto& n : names) {
    if (v == n.name) return n.value;
    allowed += (allowed.empty() ? "" : "|") + std::string(n.name);
  }
  Bad(key, v, "expected one of " + allowed);
}

template <typename E, std::size_t N>
std::string EnumToString(E v, const EnumName<E> (&names)[N]) {
  for (const auto& n : names)
    if (n.value == v) return n.name;
  return "?";
}

constexpr EnumName<ModelFamily> kFamilies[] = {{ModelFamily::kRnnt, "rnnt"},
                                               {ModelFamily::kRnnAed, "rnn_aed"},
                                               {ModelFamily::kTransformerAed, "transformer_aed"}};
constexpr EnumName<LstmKind> kLstmKinds[] = {{LstmKind::kStandard, "standard"},
                                             {LstmKind::kCustom, "custom"}};
constexpr EnumName<AttentionKind> kAttentionKinds[] = {{AttentionKind::kLocation, "location"},
                                                       {AttentionKind::kMocha, "mocha"}};
constexpr EnumName<MaskKind> kMaskKinds[] = {
    {MaskKind::kFull, "full"}, {MaskKind::kLookahead, "lookahead"}, {MaskKind::kChunk, "chunk"}};
constexpr EnumName<InitMode> kInitModes[] = {
    {InitMode::kRandom, "random"}, {InitMode::kCtc, "ctc"}, {InitMode::kCrossEntropy, "ce"}};
constexpr EnumName<DecodeMode> kDecodeModes[] = {
    {DecodeMode::kAuto, "auto"},           {DecodeMode::kGreedy, "greedy"},
    {DecodeMode::kBeam, "beam"},           {DecodeMode::kJoint, "joint"},
    {DecodeMode::kTriggered, "triggered"}, {DecodeMode::kMochaHard, "mocha_hard"},
    {DecodeMode::kAttention, "attention"}};
constexpr EnumName<bool> kEncoderKinds[] = {{false, "uni"}, {true, "bi"}};

struct Key {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define ASRLAB_SIZE_KEY(field)                                                           \
  Key {                                                                                  \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = ParseUnsigned(#field, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                \
  }
#define ASRLAB_DOUBLE_KEY(field)                                                         \
  Key {                                                                                  \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = ParseDouble(#field, v); }, \
        [](const ExperimentConfig& c) { return FormatDouble(c.field); }                  \
  }
#define ASRLAB_ENUM_KEY(key, field, table)                                               \
  Key {                                                                                  \
    key, [](ExperimentConfig& c, const std::string& v) { c.field = ParseEnum(key, v, table); }, \
        [](const ExperimentConfig& c) { return EnumToString(c.field, table); }           \
  }
#define ASRLAB_LIST_KEY(field)                                                           \
  Key {                                                                                  \
    #field, [](ExperimentConfig& c, const std::string& v) { c.field = ParseIntList(#field, v); }, \
        [](const ExperimentConfig& c) { return FormatList(c.field); }                    \
  }

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = {
      Key{"name",
          [](ExperimentConfig& c, const std::string& v) {
            if (v.empty() || v.find_first_of(" \t") != std::string::npos) {
              Bad("name", v, "expected a non-empty word");
            }
            c.name = v;
          },
          [](const ExperimentConfig& c) { return c.name; }},
      ASRLAB_ENUM_KEY("model", model, kFamilies),
      ASRLAB_ENUM_KEY("encoder", bidirectional, kEncoderKinds),
      ASRLAB_ENUM_KEY("lstm_kind", lstm_kind, kLstmKinds),
      ASRLAB_SIZE_KEY(encoder_blocks),
      ASRLAB_SIZE_KEY(cell_dim),
      ASRLAB_SIZE_KEY(proj_dim),
      ASRLAB_LIST_KEY(context_tau),
      ASRLAB_SIZE_KEY(embed_dim),
      ASRLAB_SIZE_KEY(pred_cell_dim),
      ASRLAB_SIZE_KEY(pred_proj_dim),
      ASRLAB_SIZE_KEY(joint_dim),
      ASRLAB_ENUM_KEY("attention", attention, kAttentionKinds),
      ASRLAB_SIZE_KEY(decoder_cell_dim),
      ASRLAB_SIZE_KEY(decoder_proj_dim),
      ASRLAB_SIZE_KEY(attention_dim),
      ASRLAB_SIZE_KEY(location_kernel),
      ASRLAB_SIZE_KEY(location_maps),
      ASRLAB_SIZE_KEY(mocha_window),
      ASRLAB_DOUBLE_KEY(mocha_noise_std),
      ASRLAB_DOUBLE_KEY(mocha_energy_init),
      ASRLAB_SIZE_KEY(model_dim),
      ASRLAB_SIZE_KEY(heads),
      ASRLAB_SIZE_KEY(head_dim),
      ASRLAB_SIZE_KEY(ffn_dim),
      ASRLAB_SIZE_KEY(decoder_blocks),
      ASRLAB_SIZE_KEY(vgg_channels),
      ASRLAB_ENUM_KEY("mask", mask, kMaskKinds),
      ASRLAB_LIST_KEY(lookahead),
      ASRLAB_SIZE_KEY(chunk_frames),
      ASRLAB_SIZE_KEY(chunk_right_context),
      ASRLAB_SIZE_KEY(decoder_window),
      ASRLAB_DOUBLE_KEY(ctc_weight),
      ASRLAB_ENUM_KEY("decoder", decoder, kDecodeModes),
      ASRLAB_DOUBLE_KEY(beta1),
      ASRLAB_SIZE_KEY(beam),
      ASRLAB_SIZE_KEY(top_k),
      ASRLAB_DOUBLE_KEY(learning_rate),
      ASRLAB_DOUBLE_KEY(momentum),
      ASRLAB_DOUBLE_KEY(clip_norm),
      ASRLAB_SIZE_KEY(batch_size),
      ASRLAB_SIZE_KEY(steps),
      ASRLAB_ENUM_KEY("init", init, kInitModes),
      ASRLAB_SIZE_KEY(pretrain_steps),
      ASRLAB_SIZE_KEY(corpus_size),
      ASRLAB_SIZE_KEY(corpus_seed),
      ASRLAB_DOUBLE_KEY(noise),
      ASRLAB_SIZE_KEY(stack),
      ASRLAB_SIZE_KEY(seed),
  };
  return keys;
}

std::vector<int> Expand(const std::vector<int>& v, std::size_t blocks, const char* what) {
  if (v.size() == 1) return std::vector<int>(blocks, v[0]);
  if (v.size() != blocks) {
    throw Error(std::string("config: ") + what + " lists " + std::to_string(v.size()) +
                " values for " + std::to_string(blocks) + " blocks");
  }
  return v;
}

}  // namespace

std::size_t ExperimentConfig::EffectiveStack() const {
  if (stack) return stack;
  return model == ModelFamily::kTransformerAed ? 1 : 3;
}

std::vector<int> ExperimentConfig::ContextTauPerBlock() const {
  return Expand(context_tau, encoder_blocks, "context_tau");
}

std::vector<int> ExperimentConfig::LookaheadPerBlock() const {
  return Expand(lookahead, encoder_blocks, "lookahead");
}

void ExperimentConfig::Validate() const {
  auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw Error(std::string("config: '") + key + "' must be positive");
  };
  positive(encoder_blocks, "encoder_blocks");
  positive(cell_dim, "cell_dim");
  positive(proj_dim, "proj_dim");
  positive(embed_dim, "embed_dim");
  positive(model_dim, "model_dim");
  positive(heads, "heads");
  positive(head_dim, "head_dim");
  positive(decoder_blocks, "decoder_blocks");
  positive(chunk_frames, "chunk_frames");
  positive(mocha_window, "mocha_window");
  positive(beam, "beam");
  positive(top_k, "top_k");
  positive(batch_size, "batch_size");
  positive(corpus_size, "corpus_size");
  ContextTauPerBlock();
  LookaheadPerBlock();
  if (location_kernel % 2 == 0) throw Error("config: 'location_kernel' must be odd");
  if (!(ctc_weight >= 0.0 && ctc_weight <= 1.0)) {
    throw Error("config: 'ctc_weight' must lie in [0, 1]");
  }
  if (!(beta1 >= 0.0)) throw Error("config: 'beta1' must be non-negative");
  if (!(noise >= 0.0)) throw Error("config: 'noise' must be non-negative");
  if (!(mocha_noise_std >= 0.0)) throw Error("config: 'mocha_noise_std' must be non-negative");
  if (init != InitMode::kRandom && model != ModelFamily::kRnnt) {
    throw Error("config: encoder pretraining ('init') applies to rnnt only");
  }
  if (init != InitMode::kRandom && bidirectional) {
    throw Error("config: encoder pretraining needs a uni-directional encoder");
  }
  const bool transformer = model == ModelFamily::kTransformerAed;
  switch (decoder) {
    case DecodeMode::kAuto:
      break;
    case DecodeMode::kGreedy:
    case DecodeMode::kBeam:
      if (model != ModelFamily::kRnnt) throw Error("config: greedy/beam decoding is for rnnt");
      break;
    case DecodeMode::kJoint:
    case DecodeMode::kTriggered:
      if (!transformer) throw Error("config: joint/triggered decoding is for transformer_aed");
      if (decoder == DecodeMode::kTriggered && mask == MaskKind::kFull) {
        throw Error("config: triggered decoding needs a streaming mask (lookahead or chunk)");
      }
      break;
    case DecodeMode::kMochaHard:
      if (model != ModelFamily::kRnnAed || attention != AttentionKind::kMocha) {
        throw Error("config: mocha_hard decoding needs rnn_aed with mocha attention");
      }
      break;
    case DecodeMode::kAttention:
      if (model != ModelFamily::kRnnAed) throw Error("config: attention decoding is for rnn_aed");
      break;
  }
  SgdConfig{learning_rate, momentum, clip_norm}.Validate();
}

void ApplyConfigLine(ExperimentConfig& config, std::string_view raw) {
  std::string line = Trim(raw.substr(0, raw.find('#')));
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw Error("config: expected 'key = value', got '" + line + "'");
  const std::string key = Trim(std::string_view(line).substr(0, eq));
  const std::string value = Trim(std::string_view(line).substr(eq + 1));
  for (const Key& k : Keys()) {
    if (key == k.name) {
      k.set(config, value);
      return;
    }
  }
  throw Error("config: unknown key '" + key + "'");
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ApplyConfigLine(config, text.substr(start, end - start));
    start = end + 1;
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseConfig(ss.str());
}

std::string SerializeConfig(const ExperimentConfig& config) {
  std::string out;
  for (const Key& k : Keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> out;
  for (const Key& k : Keys()) out.push_back(k.name);
  return out;
}

}  // namespace asrlab
