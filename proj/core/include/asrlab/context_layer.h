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
#ifndef ASRLAB_CONTEXT_LAYER_H_
#define ASRLAB_CONTEXT_LAYER_H_

#include <string>

#include "asrlab/params.h"

namespace asrlab {

// Element-wise weighted sum over a fixed window of future frames:
//   out[t] = sum_{d=0..tau} q[d] (.) g[t + d]
// Frames past the end of the utterance contribute nothing, so the output at
// t depends exactly on inputs t..t+tau. Adds (tau + 1) * dim parameters.
class ContextLayer {
 public:
  ContextLayer() = default;
  // Weights start as the uniform average 1 / (tau + 1).
  ContextLayer(int tau, std::size_t dim);

  Tensor Apply(const Tensor& g) const;

  int tau() const { return tau_; }
  std::size_t dim() const { return weights_.cols(); }
  std::size_t parameter_count() const { return weights_.size(); }
  // (tau + 1) x dim; row d weighs frame t + d.
  Tensor& weights() { return weights_; }
  const Tensor& weights() const { return weights_; }

  void Collect(const std::string& prefix, ParameterList& out) const;

 private:
  int tau_ = 0;
  Tensor weights_;
};

}  // namespace asrlab

#endif  // ASRLAB_CONTEXT_LAYER_H_
