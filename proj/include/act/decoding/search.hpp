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
#include <vector>

#include "act/model/params.hpp"
#include "act/numerics/tensor.hpp"
#include "act/text/vocabulary.hpp"

namespace act {

// Log-probabilities of the next token given the generated tokens so far
// (without the leading <sos>).
class NextTokenScorer {
 public:
  virtual ~NextTokenScorer() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual std::vector<double> next_log_probs(std::span<const int> generated) const = 0;
};

// Scores with the caption decoder over a fixed encoder memory.
class ModelScorer : public NextTokenScorer {
 public:
  ModelScorer(const ModelParams& params, Tensor memory);
  std::size_t vocab_size() const override;
  std::vector<double> next_log_probs(std::span<const int> generated) const override;

 private:
  const ModelParams& params_;
  Tensor memory_;
};

struct DecodeOptions {
  std::size_t max_len = 22;  // generated tokens, <eos> included
  std::vector<int> banned = {Vocabulary::kPad, Vocabulary::kUnk};
  bool length_norm = false;  // rank by score / length
};

struct BeamHypothesis {
  std::vector<int> tokens;  // generated tokens, without <sos>
  double log_prob = 0.0;
  bool finished = false;  // ended with <eos>
};

struct BeamResult {
  CaptionTokens best;
  double best_score = 0.0;  // sum of token log-probabilities
  std::vector<BeamHypothesis> top;  // best first, at most beam_size
};

// Argmax at every step (ties to the lowest id).
CaptionTokens greedy_decode(const NextTokenScorer& scorer, const DecodeOptions& opts = {});

// Keeps the beam_size best expansions per step, ties going to the
// lexicographically smaller sequence. Hypotheses that emit <eos>, or reach
// max_len, retire to a pool; the best pooled hypothesis wins.
BeamResult beam_search_decode(const NextTokenScorer& scorer, std::size_t beam_size, const DecodeOptions& opts = {});

// Wraps generated tokens as <sos> ... <eos>.
CaptionTokens finish_caption(std::span<const int> generated);

}  // namespace act
