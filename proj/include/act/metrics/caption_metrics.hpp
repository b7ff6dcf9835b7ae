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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "act/text/vocabulary.hpp"

namespace act {

struct EvalPair {
  Sentence candidate;
  std::vector<Sentence> references;
};

enum class BleuSmoothing {
  kNone,
  kAddOne,  // (matches + 1) / (total + 1) for orders above 1
};

// Corpus BLEU with clipped counts pooled over all clips, uniform weights over
// orders 1..n and a brevity penalty against the closest reference lengths.
double bleu(std::span<const EvalPair> pairs, std::size_t n, BleuSmoothing smoothing = BleuSmoothing::kNone);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);
// Best F-measure over references of one clip; 0 for an empty candidate.
double rouge_l_clip(const EvalPair& pair, double beta = 1.2);
double rouge_l(std::span<const EvalPair> pairs, double beta = 1.2);

struct CiderResult {
  double score = 0.0;
  std::vector<double> per_clip;
  // Document frequencies are meaningless on a single clip; every IDF weight
  // is zero and so is the score.
  bool degenerate = false;
};

// CIDEr-D: clipped TF-IDF n-gram vectors, per-order cosine averaged over
// references, Gaussian length penalty, mean over orders, times 10.
CiderResult cider_d(std::span<const EvalPair> pairs, std::size_t max_n = 4, double sigma = 6.0);

struct SpiderResult {
  double cider = 0.0;
  std::optional<double> spice;
  std::optional<double> spider;  // empty when SPICE was not supplied
};
inline constexpr const char* kSpiceUnavailable = "SPICE unavailable";

SpiderResult spider(double cider, std::optional<double> spice);

}  // namespace act
