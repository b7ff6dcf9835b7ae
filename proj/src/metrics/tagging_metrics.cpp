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

#include "act/metrics/tagging_metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "act/error.hpp"

namespace act {

double average_precision(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0, total = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double y = labels[order[rank]];
    if (y != 0.0 && y != 1.0) throw InvalidArgument("labels must be 0 or 1");
    if (y == 1.0) {
      hits += 1.0;
      total += hits / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0.0) throw InvalidArgument("average precision needs at least one positive");
  return total / hits;
}

double mean_average_precision(std::span<const double> scores, std::span<const double> labels, std::size_t classes) {
  if (classes == 0) throw InvalidArgument("mAP needs at least one class");
  if (scores.size() != labels.size() || scores.size() % classes != 0) {
    throw InvalidArgument("scores and labels must both be clips x " + std::to_string(classes));
  }
  const std::size_t clips = scores.size() / classes;
  double total = 0.0;
  std::size_t used = 0;
  std::vector<double> s(clips), y(clips);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t i = 0; i < clips; ++i) {
      s[i] = scores[i * classes + k];
      y[i] = labels[i * classes + k];
    }
    if (std::find(y.begin(), y.end(), 1.0) == y.end()) continue;
    total += average_precision(s, y);
    ++used;
  }
  if (used == 0) throw InvalidArgument("no class has a positive clip");
  return total / static_cast<double>(used);
}

}  // namespace act
