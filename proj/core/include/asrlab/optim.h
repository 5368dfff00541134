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
// Gradient descent with momentum and global gradient-norm clipping.

#ifndef ASRLAB_OPTIM_H_
#define ASRLAB_OPTIM_H_

#include <vector>

#include "asrlab/params.h"

namespace asrlab {

struct SgdConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  // Gradients are rescaled to this global norm when larger; 0 disables.
  double clip_norm = 5.0;
  void Validate() const;
};

class SgdMomentum {
 public:
  SgdMomentum(ParameterList params, const SgdConfig& config);

  // v = momentum * v + g;  w -= lr * v.  Consumes and clears the gradients.
  // Returns the gradient norm before clipping; a non-finite norm throws
  // without touching the parameters.
  double Step();
  const ParameterList& params() const { return params_; }

 private:
  ParameterList params_;
  SgdConfig config_;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace asrlab

#endif  // ASRLAB_OPTIM_H_
