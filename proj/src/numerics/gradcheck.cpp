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

#include "act/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "act/error.hpp"

namespace act {

namespace {

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw NumericError("finite difference step must be positive and finite");
}

double finite_value(const Tensor& t, const char* what) {
  const double v = t.item();
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what + " in gradient check");
  return v;
}

// Central difference of `eval` w.r.t. coordinate i of `x`.
template <typename Eval>
double central_difference(Tensor& x, std::size_t i, double h, Eval&& eval) {
  auto w = x.mutable_data();
  const double original = w[i];
  w[i] = original + h;
  const double plus = eval();
  w[i] = original - h;
  const double minus = eval();
  w[i] = original;
  return (plus - minus) / (2.0 * h);
}

}  // namespace

double relative_gradient_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-12, std::abs(analytic) + std::abs(numeric));
}

double finite_diff_check(const std::function<Tensor(const Tensor&)>& f, Tensor x, double h) {
  check_step(h);
  const bool had_grad = x.requires_grad();
  x.set_requires_grad(true);
  x.zero_grad();
  Tensor loss = f(x);
  finite_value(loss, "loss");
  backward(loss);
  std::vector<double> analytic(x.grad().begin(), x.grad().end());
  x.zero_grad();

  double worst = 0.0;
  {
    NoGradGuard no_grad;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      if (!std::isfinite(analytic[i])) throw NumericError("non-finite analytic gradient");
      const double numeric = central_difference(x, i, h, [&] { return finite_value(f(x), "loss"); });
      worst = std::max(worst, relative_gradient_error(analytic[i], numeric));
    }
  }
  x.set_requires_grad(had_grad);
  return worst;
}

GradCheckResult finite_diff_check(const std::function<Tensor()>& loss, const ParameterStore& params, double h) {
  check_step(h);
  params.zero_grad();
  Tensor value = loss();
  finite_value(value, "loss");
  backward(value);

  GradCheckResult result;
  NoGradGuard no_grad;
  for (const auto& entry : params) {
    Tensor p = entry.tensor;
    std::vector<double> analytic(p.grad().begin(), p.grad().end());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      if (!std::isfinite(analytic[i])) throw NumericError("non-finite analytic gradient in " + entry.name);
      const double numeric = central_difference(p, i, h, [&] { return finite_value(loss(), "loss"); });
      const double err = relative_gradient_error(analytic[i], numeric);
      ++result.coordinates;
      if (err > result.max_rel_error || result.worst_tensor.empty()) {
        if (err >= result.max_rel_error) {
          result.max_rel_error = err;
          result.worst_tensor = entry.name;
          result.worst_index = i;
          result.worst_analytic = analytic[i];
          result.worst_numeric = numeric;
        }
      }
    }
  }
  params.zero_grad();
  return result;
}

}  // namespace act
