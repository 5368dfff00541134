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
#include "asrlab/corpus_io.h"

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace asrlab {

namespace {

constexpr const char* kCorpusMagic = "ASRLAB-CORPUS 1";

void PutFloat64(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

double GetFloat64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error("corpus: truncated frame payload");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

std::string ReadLine(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw Error(std::string("corpus: missing ") + what);
  return line;
}

std::string ExpectPrefix(const std::string& line, const std::string& prefix) {
  if (line.rfind(prefix, 0) != 0) {
    throw Error("corpus: expected '" + prefix + "' line, got '" + line + "'");
  }
  return line.substr(prefix.size());
}

}  // namespace

std::vector<std::pair<int, std::size_t>> RunLengths(std::span<const int> labels) {
  std::vector<std::pair<int, std::size_t>> runs;
  for (int k : labels) {
    if (!runs.empty() && runs.back().first == k) {
      ++runs.back().second;
    } else {
      runs.emplace_back(k, 1);
    }
  }
  return runs;
}

std::vector<int> ExpandRuns(std::span<const std::pair<int, std::size_t>> runs) {
  std::vector<int> out;
  for (const auto& [k, n] : runs) out.insert(out.end(), n, k);
  return out;
}

void WriteCorpus(std::ostream& os, const Corpus& corpus) {
  os << kCorpusMagic << '\n' << corpus.size() << '\n';
  for (const Utterance& u : corpus) {
    u.features.Validate();
    if (u.id.find_first_of(" \n") != std::string::npos) {
      throw Error("corpus: utterance id '" + u.id + "' contains whitespace");
    }
    std::ostringstream shift;
    shift.precision(17);
    shift << u.features.frame_shift_ms;
    os << "utt " << u.id << ' ' << u.features.frames << ' ' << u.features.dim << ' '
       << shift.str() << '\n';
    for (double v : u.features.values) PutFloat64(os, v);
    os << '\n' << "text " << u.text << '\n' << "tokens";
    for (int tok : u.tokens) os << ' ' << tok;
    os << '\n' << "align";
    for (const auto& [k, n] : RunLengths(u.alignment)) os << ' ' << k << ' ' << n;
    os << '\n';
  }
  if (!os) throw Error("corpus: write failed");
}

Corpus ReadCorpus(std::istream& is) {
  if (ReadLine(is, "header") != kCorpusMagic) throw Error("corpus: bad magic line");
  std::size_t count = 0;
  {
    std::istringstream ss(ReadLine(is, "utterance count"));
    if (!(ss >> count)) throw Error("corpus: bad utterance count");
  }
  Corpus corpus;
  corpus.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Utterance u;
    std::istringstream head(ExpectPrefix(ReadLine(is, "utterance header"), "utt "));
    if (!(head >> u.id >> u.features.frames >> u.features.dim >> u.features.frame_shift_ms)) {
      throw Error("corpus: malformed utterance header");
    }
    u.features.values.resize(u.features.frames * u.features.dim);
    for (double& v : u.features.values) v = GetFloat64(is);
    if (is.get() != '\n') throw Error("corpus: missing newline after frame payload");
    u.features.Validate();
    u.text = ExpectPrefix(ReadLine(is, "text line"), "text ");
    std::istringstream toks(ExpectPrefix(ReadLine(is, "token line"), "tokens"));
    for (int tok; toks >> tok;) {
      if (tok < kFirstLabel) throw Error("corpus: reserved id in the tokens of " + u.id);
      u.tokens.push_back(tok);
    }
    if (!toks.eof()) throw Error("corpus: malformed token line of " + u.id);
    std::istringstream al(ExpectPrefix(ReadLine(is, "alignment line"), "align"));
    std::vector<std::pair<int, std::size_t>> runs;
    int k;
    std::size_t len;
    while (al >> k >> len) runs.emplace_back(k, len);
    u.alignment = ExpandRuns(runs);
    if (u.alignment.size() != u.features.frames) {
      throw Error("corpus: alignment of " + u.id + " covers " +
                  std::to_string(u.alignment.size()) + " of " +
                  std::to_string(u.features.frames) + " frames");
    }
    corpus.push_back(std::move(u));
  }
  return corpus;
}

void WriteCorpusFile(const std::string& path, const Corpus& corpus) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("corpus: cannot open " + path + " for writing");
  WriteCorpus(os, corpus);
}

Corpus ReadCorpusFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("corpus: cannot open " + path);
  return ReadCorpus(is);
}

void WriteAlignments(std::ostream& os, const std::vector<std::string>& ids,
                     const std::vector<std::vector<int>>& alignments) {
  if (ids.size() != alignments.size()) throw Error("alignments: id/alignment count mismatch");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    os << ids[i];
    for (const auto& [k, n] : RunLengths(alignments[i])) os << ' ' << k << ' ' << n;
    os << '\n';
  }
}

std::vector<std::pair<std::string, std::vector<int>>> ReadAlignments(std::istream& is) {
  std::vector<std::pair<std::string, std::vector<int>>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    ss >> id;
    std::vector<std::pair<int, std::size_t>> runs;
    int k;
    std::size_t n;
    while (ss >> k >> n) runs.emplace_back(k, n);
    if (!ss.eof()) throw Error("alignments: malformed line for " + id);
    out.emplace_back(id, ExpandRuns(runs));
  }
  return out;
}

}  // namespace asrlab
