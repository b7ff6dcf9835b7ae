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

// Skip-gram word embeddings trained with negative sampling.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "act/text/vocabulary.hpp"

namespace act {

struct SkipGramConfig {
  std::size_t dim = 512;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

struct WordEmbeddings {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> matrix;  // rows x dim, row i embeds vocabulary id i

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(matrix).subspan(i * dim, dim);
  }
};

struct SkipGramTrace {
  std::vector<double> epoch_loss;  // mean loss over all pairs seen in the epoch
  std::vector<double> probe_loss;  // loss of the first sentence's pairs with fixed negatives, after each epoch
};

// (center, context) pairs within `window` positions, in sentence order.
std::vector<std::pair<int, int>> skipgram_pairs(std::span<const int> sentence, std::size_t window);

// Returns the input-side embedding matrix, one row per vocabulary id.
WordEmbeddings train_skipgram(std::span<const Sentence> corpus, const Vocabulary& vocab, const SkipGramConfig& cfg,
                              SkipGramTrace* trace = nullptr);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace act
