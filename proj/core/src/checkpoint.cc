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
#include "asrlab/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace asrlab {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw Error("checkpoint: truncated file");
  }
  return v;
}

std::string GetString(std::istream& is, std::uint64_t n) {
  if (n > (1u << 28)) throw Error("checkpoint: implausible string length");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n))) {
    throw Error("checkpoint: truncated file");
  }
  return s;
}

}  // namespace

void WriteCheckpoint(std::ostream& os, const std::string& config, const ParameterList& params) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  Put<std::uint32_t>(os, kCheckpointVersion);
  Put<std::uint64_t>(os, config.size());
  os.write(config.data(), static_cast<std::streamsize>(config.size()));
  Put<std::uint64_t>(os, params.size());
  for (const NamedTensor& p : params) {
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    const Shape& shape = p.tensor.shape();
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) Put<std::uint64_t>(os, d);
    auto v = p.tensor.values();
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!os) throw Error("checkpoint: write failed");
}

Checkpoint ReadCheckpoint(std::istream& is) {
  char magic[sizeof(kCheckpointMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error("checkpoint: bad magic");
  }
  const auto version = Get<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.config = GetString(is, Get<std::uint64_t>(is));
  const auto count = Get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedTensor nt;
    nt.name = GetString(is, Get<std::uint32_t>(is));
    const auto rank = Get<std::uint32_t>(is);
    if (rank > 8) throw Error("checkpoint: implausible rank for '" + nt.name + "'");
    Shape shape(rank);
    for (std::size_t& d : shape) d = Get<std::uint64_t>(is);
    std::vector<double> values(ShapeSize(shape));
    if (!is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
      throw Error("checkpoint: truncated file");
    }
    nt.tensor = Tensor::FromValues(std::move(shape), std::move(values), true);
    ck.tensors.push_back(std::move(nt));
  }
  return ck;
}

void SaveCheckpoint(const std::string& path, const std::string& config,
                    const ParameterList& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("checkpoint: cannot open '" + path + "' for writing");
  WriteCheckpoint(os, config, params);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("checkpoint: cannot open '" + path + "'");
  return ReadCheckpoint(is);
}

void RestoreParameters(const ParameterList& target, const ParameterList& source,
                       bool allow_extra) {
  std::map<std::string, const Tensor*> by_name;
  for (const NamedTensor& s : source) by_name[s.name] = &s.tensor;
  std::string problems;
  auto note = [&problems](const std::string& msg) {
    problems += problems.empty() ? msg : "; " + msg;
  };
  std::map<std::string, bool> used;
  for (const NamedTensor& t : target) {
    auto it = by_name.find(t.name);
    if (it == by_name.end()) {
      note("missing '" + t.name + "'");
      continue;
    }
    used[t.name] = true;
    if (it->second->shape() != t.tensor.shape()) {
      note("'" + t.name + "' has shape " + ShapeString(it->second->shape()) + ", expected " +
           ShapeString(t.tensor.shape()));
    }
  }
  if (!allow_extra) {
    for (const NamedTensor& s : source)
      if (!used.count(s.name)) note("unexpected '" + s.name + "'");
  }
  if (!problems.empty()) throw Error("parameter mismatch: " + problems);
  for (const NamedTensor& t : target) {
    Tensor dst = t.tensor;
    auto src = by_name[t.name]->values();
    std::copy(src.begin(), src.end(), dst.mutable_values().begin());
  }
}

}  // namespace asrlab
