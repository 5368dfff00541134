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
// On-disk corpus and alignment formats. Byte layouts are documented in
// docs/formats.md.

#ifndef ASRLAB_CORPUS_IO_H_
#define ASRLAB_CORPUS_IO_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asrlab/data.h"

namespace asrlab {

void WriteCorpus(std::ostream& os, const Corpus& corpus);
Corpus ReadCorpus(std::istream& is);
void WriteCorpusFile(const std::string& path, const Corpus& corpus);
Corpus ReadCorpusFile(const std::string& path);

// Run-length form of a per-frame label sequence.
std::vector<std::pair<int, std::size_t>> RunLengths(std::span<const int> labels);
std::vector<int> ExpandRuns(std::span<const std::pair<int, std::size_t>> runs);

// One line per utterance: "<id> <token> <run> <token> <run> ...".
void WriteAlignments(std::ostream& os, const std::vector<std::string>& ids,
                     const std::vector<std::vector<int>>& alignments);
std::vector<std::pair<std::string, std::vector<int>>> ReadAlignments(std::istream& is);

}  // namespace asrlab

#endif  // ASRLAB_CORPUS_IO_H_
