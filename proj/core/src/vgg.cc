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
#include "asrlab/vgg.h"

#include "asrlab/ops.h"

namespace asrlab {

VggFrontend::VggFrontend(const VggConfig& config, Rng& rng)
    : conv1_(3 * config.input_dim, config.channels1, rng),
      conv2_(3 * config.channels1, config.channels2, rng),
      output_(config.channels2, config.output_dim, rng) {}

std::size_t VggFrontend::OutputLength(std::size_t frames) {
  return (frames + kStride - 1) / kStride;
}

Tensor VggFrontend::Forward(const Tensor& x) const {
  if (x.rank() != 2 || x.rows() == 0) throw Error("vgg frontend: empty input");
  if (x.cols() * 3 != conv1_.in_dim()) {
    throw Error("vgg frontend: input " + ShapeString(x.shape()) +
                " does not match feature dimension " +
                std::to_string(conv1_.in_dim() / 3));
  }
  Tensor h = MaxPoolRows(Relu(conv1_.Forward(UnfoldTime(x, -2, 0))), 2);
  h = MaxPoolRows(Relu(conv2_.Forward(UnfoldTime(h, -2, 0))), 2);
  return output_.Forward(h);
}

void VggFrontend::Collect(const std::string& prefix, ParameterList& out) const {
  conv1_.Collect(prefix + ".conv1", out);
  conv2_.Collect(prefix + ".conv2", out);
  output_.Collect(prefix + ".output", out);
}

}  // namespace asrlab
