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
#ifndef ASRLAB_VGG_H_
#define ASRLAB_VGG_H_

#include <string>

#include "asrlab/params.h"

namespace asrlab {

struct VggConfig {
  std::size_t input_dim = 16;
  std::size_t channels1 = 16;
  std::size_t channels2 = 16;
  std::size_t output_dim = 32;
};

// Two stages of (causal width-3 time convolution, relu, max-pool by 2), then
// a linear map to the model dimension. Total time stride 4; T input frames
// give ceil(T / 4) outputs. Order information comes from the convolutions,
// so no position embedding is added downstream.
class VggFrontend {
 public:
  static constexpr std::size_t kStride = 4;

  struct ReceptiveField {
    // Raw frames relative to the first raw frame 4e of output frame e.
    int past;
    int future;
  };

  VggFrontend() = default;
  VggFrontend(const VggConfig& config, Rng& rng);

  Tensor Forward(const Tensor& x) const;

  static std::size_t OutputLength(std::size_t frames);
  // Output frame e depends on raw frames [4e - past, 4e + future]. The
  // future part never leaves the frame's own stride window, so the frontend
  // adds no lookahead measured in output frames.
  static ReceptiveField receptive_field() { return {6, 3}; }
  static int lookahead_output_frames() { return 0; }

  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  Linear conv1_;  // 3*input x channels1
  Linear conv2_;  // 3*channels1 x channels2
  Linear output_;
};

}  // namespace asrlab

#endif  // ASRLAB_VGG_H_
