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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "act/metrics/caption_metrics.hpp"

namespace act {

inline constexpr int kMetricReportVersion = 1;

using ScoreList = std::vector<std::pair<std::string, double>>;

struct ClipScores {
  std::string id;
  ScoreList scores;
};

struct MetricReport {
  ScoreList corpus;
  std::vector<ClipScores> clips;
  ScoreList metadata;  // numeric facts such as clip count and n-gram orders
  std::vector<std::pair<std::string, std::string>> unavailable;  // metric -> reason

  std::optional<double> find(const std::string& metric) const;
  // "key=value" lines; numbers printed with 6 decimals.
  std::string to_text() const;
  // Versioned JSON document.
  std::string to_json() const;
};

// BLEU_1..4, ROUGE_L, CIDEr (CIDEr-D) and SPIDEr when a SPICE score is given.
// Clips are sorted by id first so the report does not depend on input order.
MetricReport evaluate_captions(std::span<const std::string> ids, std::span<const EvalPair> pairs,
                               std::optional<double> spice = std::nullopt);

}  // namespace act
