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

#include <cstdint>
#include <span>
#include <vector>

#include "act/numerics/tensor.hpp"

namespace act {

// Mean over non-pad positions of -sum_k q_k log p_k, where q puts
// 1 - eps + eps/K on the target and eps/K elsewhere. logits: T x K.
Tensor label_smoothed_ce(const Tensor& logits, std::span<const int> targets, double smoothing);

// Binary cross entropy from logits, averaged over all entries. labels: same
// shape as logits with entries in {0, 1}.
Tensor bce_with_logits(const Tensor& logits, const Tensor& labels);

// Same loss evaluated on probabilities, clamped away from 0 and 1.
double bce_from_probabilities(std::span<const double> probs, std::span<const double> labels);

}  // namespace act
