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

#include "act/training/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "act/error.hpp"
#include "act/numerics/ops.hpp"
#include "act/text/vocabulary.hpp"

namespace act {

namespace {

void check_binary(std::span<const double> labels) {
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw InvalidArgument("tag labels must be 0 or 1, got " + std::to_string(y));
  }
}

}  // namespace

Tensor label_smoothed_ce(const Tensor& logits, std::span<const int> targets, double smoothing) {
  if (logits.rank() != 2) throw InvalidArgument("logits must be T x K");
  if (smoothing < 0.0 || smoothing >= 1.0) throw InvalidArgument("smoothing must be in [0, 1)");
  const std::size_t t = logits.dim(0), k = logits.dim(1);
  if (targets.size() != t) {
    throw InvalidArgument(std::to_string(targets.size()) + " targets for " + std::to_string(t) + " logit rows");
  }
  std::vector<double> q(t * k, 0.0);
  std::size_t counted = 0;
  const double off = smoothing / static_cast<double>(k);
  for (std::size_t i = 0; i < t; ++i) {
    const int y = targets[i];
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw InvalidArgument("target id " + std::to_string(y) + " outside vocabulary of " + std::to_string(k));
    }
    if (y == Vocabulary::kPad) continue;
    ++counted;
    std::fill(q.begin() + static_cast<std::ptrdiff_t>(i * k), q.begin() + static_cast<std::ptrdiff_t>((i + 1) * k),
              off);
    q[i * k + static_cast<std::size_t>(y)] += 1.0 - smoothing;
  }
  if (counted == 0) throw InvalidArgument("every target is padding");
  Tensor weights({t, k}, std::move(q));
  return scale(sum(mul(weights, log_softmax(logits))), -1.0 / static_cast<double>(counted));
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& labels) {
  if (logits.shape() != labels.shape()) throw InvalidArgument("labels must match logits shape");
  check_binary(labels.data());
  // softplus(z) - y z == -[y log s(z) + (1 - y) log(1 - s(z))]
  return mean(sub(softplus(logits), mul(labels, logits)));
}

double bce_from_probabilities(std::span<const double> probs, std::span<const double> labels) {
  if (probs.size() != labels.size() || probs.empty()) throw InvalidArgument("probabilities and labels differ in size");
  check_binary(labels);
  constexpr double kClamp = 1e-12;
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kClamp, 1.0 - kClamp);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log1p(-p);
  }
  return total / static_cast<double>(probs.size());
}

}  // namespace act
