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

#include <cstddef>
#include <span>

namespace act {

// Mean of the precision at each positive in the ranking by descending score.
// Equal scores keep their input order.
double average_precision(std::span<const double> scores, std::span<const double> labels);

// Unweighted mean of per-class AP over classes with at least one positive.
// scores and labels are clips x classes, row-major.
double mean_average_precision(std::span<const double> scores, std::span<const double> labels, std::size_t classes);

}  // namespace act
