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
#include "asrlab/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace asrlab {

GradCheckResult FiniteDifferenceCheck(const std::function<Tensor()>& f,
                                      std::vector<Tensor> params,
                                      double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) {
    throw Error("gradcheck: epsilon must lie in (0, 1e-3]");
  }
  for (Tensor& p : params) {
    if (!p.requires_grad()) throw Error("gradcheck: parameter without requires_grad");
    p.ZeroGrad();
  }
  {
    Tape tape;
    Tensor loss = f();
    tape.Backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  for (Tensor& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
    if (analytic.back().empty()) analytic.back().assign(p.size(), 0.0);
  }

  const double base = f().item();
  if (f().item() != base) throw Error("gradcheck: function is not deterministic");

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double up = f().item();
      values[i] = saved - epsilon;
      const double down = f().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
      const double err = std::abs(a - numeric) / denom;
      ++result.coordinates;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_param = k;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace asrlab
