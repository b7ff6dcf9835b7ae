// Copyright 2026 The ACT Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>

#include "act/numerics/optim.hpp"
#include "act/numerics/tensor.hpp"

namespace act {

// Worst coordinate found by a central-difference gradient check. The error
// of a coordinate is |analytic - numeric| / max(1e-12, |analytic| + |numeric|).
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

double relative_gradient_error(double analytic, double numeric);

// Checks d f(x) / dx for a scalar-valued f. `x` is perturbed in place and
// restored. Throws NumericError for h <= 0 or non-finite values.
double finite_diff_check(const std::function<Tensor(const Tensor&)>& f, Tensor x, double h);

// Same check over every coordinate of every tensor in `params`; `loss`
// rebuilds the graph from the current parameter values on each call.
GradCheckResult finite_diff_check(const std::function<Tensor()>& loss, const ParameterStore& params, double h);

}  // namespace act
