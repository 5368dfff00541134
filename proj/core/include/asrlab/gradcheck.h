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
#ifndef ASRLAB_GRADCHECK_H_
#define ASRLAB_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "asrlab/tensor.h"

namespace asrlab {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  // Location of the worst coordinate.
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares tape gradients of a scalar function against central differences.
// Per coordinate the error is |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-12); the maximum over all coordinates of all params is
// returned. `f` must rebuild its result from the current parameter values on
// every call; two evaluations that disagree bit-wise raise Error.
GradCheckResult FiniteDifferenceCheck(const std::function<Tensor()>& f,
                                      std::vector<Tensor> params,
                                      double epsilon = 1e-5);

}  // namespace asrlab

#endif  // ASRLAB_GRADCHECK_H_
