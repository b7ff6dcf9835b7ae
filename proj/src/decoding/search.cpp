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

#include "act/decoding/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "act/error.hpp"
#include "act/model/model.hpp"
#include "act/numerics/ops.hpp"

namespace act {

namespace {

std::vector<bool> allowed_tokens(std::size_t vocab, const DecodeOptions& opts) {
  std::vector<bool> allowed(vocab, true);
  for (int id : opts.banned) {
    if (id >= 0 && static_cast<std::size_t>(id) < vocab) allowed[static_cast<std::size_t>(id)] = false;
  }
  return allowed;
}

double rank_score(const BeamHypothesis& h, bool length_norm) {
  if (!length_norm || h.tokens.empty()) return h.log_prob;
  return h.log_prob / static_cast<double>(h.tokens.size());
}

struct BetterHypothesis {
  bool length_norm;
  bool operator()(const BeamHypothesis& a, const BeamHypothesis& b) const {
    const double sa = rank_score(a, length_norm), sb = rank_score(b, length_norm);
    if (sa != sb) return sa > sb;
    return a.tokens < b.tokens;
  }
};

}  // namespace

ModelScorer::ModelScorer(const ModelParams& params, Tensor memory) : params_(params), memory_(std::move(memory)) {
  if (!params_.config().decoder.enabled()) throw InvalidArgument("model has no caption decoder");
}

std::size_t ModelScorer::vocab_size() const { return params_.config().decoder.vocab_size; }

std::vector<double> ModelScorer::next_log_probs(std::span<const int> generated) const {
  NoGradGuard no_grad;
  std::vector<int> prefix;
  prefix.reserve(generated.size() + 1);
  prefix.push_back(Vocabulary::kSos);
  prefix.insert(prefix.end(), generated.begin(), generated.end());
  Tensor logits = decoder_forward(prefix, memory_, params_);
  Tensor last = log_softmax(slice_rows(logits, prefix.size() - 1, prefix.size()));
  return {last.data().begin(), last.data().end()};
}

CaptionTokens finish_caption(std::span<const int> generated) {
  CaptionTokens out;
  out.ids.push_back(Vocabulary::kSos);
  for (int id : generated) {
    if (id == Vocabulary::kEos) break;
    out.ids.push_back(id);
  }
  out.ids.push_back(Vocabulary::kEos);
  return out;
}

CaptionTokens greedy_decode(const NextTokenScorer& scorer, const DecodeOptions& opts) {
  if (opts.max_len < 1) throw InvalidArgument("max_len must be at least 1");
  const std::vector<bool> allowed = allowed_tokens(scorer.vocab_size(), opts);
  std::vector<int> generated;
  for (std::size_t step = 0; step < opts.max_len; ++step) {
    const std::vector<double> lp = scorer.next_log_probs(generated);
    int best = -1;
    for (std::size_t k = 0; k < lp.size(); ++k) {
      if (!allowed[k]) continue;
      if (best < 0 || lp[k] > lp[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    if (best < 0) throw InvalidArgument("every token is banned");
    generated.push_back(best);
    if (best == Vocabulary::kEos) break;
  }
  return finish_caption(generated);
}

BeamResult beam_search_decode(const NextTokenScorer& scorer, std::size_t beam_size, const DecodeOptions& opts) {
  if (beam_size < 1) throw InvalidArgument("beam size must be at least 1");
  if (opts.max_len < 1) throw InvalidArgument("max_len must be at least 1");
  const std::vector<bool> allowed = allowed_tokens(scorer.vocab_size(), opts);
  const BetterHypothesis better{opts.length_norm};

  std::vector<BeamHypothesis> live(1);
  std::vector<BeamHypothesis> pool;
  for (std::size_t step = 1; step <= opts.max_len && !live.empty(); ++step) {
    std::vector<BeamHypothesis> candidates;
    for (const BeamHypothesis& h : live) {
      const std::vector<double> lp = scorer.next_log_probs(h.tokens);
      for (std::size_t k = 0; k < lp.size(); ++k) {
        if (!allowed[k] || lp[k] == -std::numeric_limits<double>::infinity()) continue;
        BeamHypothesis next{h.tokens, h.log_prob + lp[k], k == static_cast<std::size_t>(Vocabulary::kEos)};
        next.tokens.push_back(static_cast<int>(k));
        candidates.push_back(std::move(next));
      }
    }
    if (candidates.empty()) throw InvalidArgument("every token is banned");
    const std::size_t keep = std::min(beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      better);
    candidates.resize(keep);

    live.clear();
    for (BeamHypothesis& h : candidates) {
      if (h.finished || step == opts.max_len) {
        pool.push_back(std::move(h));
      } else {
        live.push_back(std::move(h));
      }
    }
    // Unnormalised scores only fall as hypotheses grow, so once the pool
    // beats every live hypothesis the winner is settled.
    if (!opts.length_norm && !pool.empty() && !live.empty()) {
      const double best_pool = std::max_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
                                 return a.log_prob < b.log_prob;
                               })->log_prob;
      const double best_live = std::max_element(live.begin(), live.end(), [](const auto& a, const auto& b) {
                                 return a.log_prob < b.log_prob;
                               })->log_prob;
      if (best_pool > best_live) break;
    }
  }

  std::sort(pool.begin(), pool.end(), better);
  BeamResult result;
  result.best = finish_caption(pool.front().tokens);
  result.best_score = pool.front().log_prob;
  pool.resize(std::min(pool.size(), beam_size));
  result.top = std::move(pool);
  return result;
}

}  // namespace act
