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
// Binary parameter checkpoints. Byte layout is documented in
// docs/formats.md.

#ifndef ASRLAB_CHECKPOINT_H_
#define ASRLAB_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "asrlab/params.h"

namespace asrlab {

inline constexpr char kCheckpointMagic[8] = {'A', 'S', 'R', 'L', 'A', 'B', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  // Configuration text the parameters were created from.
  std::string config;
  ParameterList tensors;
};

void WriteCheckpoint(std::ostream& os, const std::string& config, const ParameterList& params);
Checkpoint ReadCheckpoint(std::istream& is);
void SaveCheckpoint(const std::string& path, const std::string& config,
                    const ParameterList& params);
Checkpoint LoadCheckpoint(const std::string& path);

// Copies values from `source` into `target` by name. Every target name
// must be present with the same shape and, unless `allow_extra` is set,
// the source may not carry names the target lacks. Offenders are listed in
// the error message.
void RestoreParameters(const ParameterList& target, const ParameterList& source,
                       bool allow_extra = false);

}  // namespace asrlab

#endif  // ASRLAB_CHECKPOINT_H_
