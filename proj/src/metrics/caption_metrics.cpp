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

#include "act/metrics/caption_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "act/error.hpp"

namespace act {

namespace {

using NgramCounts = std::map<std::vector<std::string>, double>;

NgramCounts ngrams(std::span<const std::string> words, std::size_t n) {
  NgramCounts counts;
  if (words.size() < n) return counts;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    counts[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                    words.begin() + static_cast<std::ptrdiff_t>(i + n))] += 1.0;
  }
  return counts;
}

void check_pairs(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("no candidates to evaluate");
  for (const EvalPair& p : pairs) {
    if (p.references.empty()) throw InvalidArgument("every candidate needs at least one reference");
  }
}

}  // namespace

double bleu(std::span<const EvalPair> pairs, std::size_t n, BleuSmoothing smoothing) {
  check_pairs(pairs);
  if (n < 1) throw InvalidArgument("BLEU order must be at least 1");
  std::vector<double> matches(n, 0.0), totals(n, 0.0);
  double cand_len = 0.0, ref_len = 0.0;
  for (const EvalPair& p : pairs) {
    const double c = static_cast<double>(p.candidate.size());
    cand_len += c;
    // Closest reference length, shorter one on ties.
    double best = -1.0;
    for (const Sentence& r : p.references) {
      const double len = static_cast<double>(r.size());
      if (best < 0.0 || std::abs(len - c) < std::abs(best - c) || (std::abs(len - c) == std::abs(best - c) && len < best)) {
        best = len;
      }
    }
    ref_len += best;
    for (std::size_t order = 1; order <= n; ++order) {
      const NgramCounts cand = ngrams(p.candidate, order);
      NgramCounts max_ref;
      for (const Sentence& r : p.references) {
        for (const auto& [g, count] : ngrams(r, order)) max_ref[g] = std::max(max_ref[g], count);
      }
      for (const auto& [g, count] : cand) {
        auto it = max_ref.find(g);
        if (it != max_ref.end()) matches[order - 1] += std::min(count, it->second);
        totals[order - 1] += count;
      }
    }
  }
  if (cand_len == 0.0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = matches[i], t = totals[i];
    if (smoothing == BleuSmoothing::kAddOne && i > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return bp * std::exp(log_sum / static_cast<double>(n));
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_clip(const EvalPair& pair, double beta) {
  if (pair.references.empty()) throw InvalidArgument("every candidate needs at least one reference");
  if (pair.candidate.empty()) return 0.0;
  const double b2 = beta * beta;
  double best = 0.0;
  for (const Sentence& ref : pair.references) {
    if (ref.empty()) continue;
    const double lcs = static_cast<double>(lcs_length(pair.candidate, ref));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(pair.candidate.size());
    const double r = lcs / static_cast<double>(ref.size());
    best = std::max(best, (1.0 + b2) * p * r / (r + b2 * p));
  }
  return best;
}

double rouge_l(std::span<const EvalPair> pairs, double beta) {
  check_pairs(pairs);
  double total = 0.0;
  for (const EvalPair& p : pairs) total += rouge_l_clip(p, beta);
  return total / static_cast<double>(pairs.size());
}

namespace {

struct TfIdfVector {
  std::vector<NgramCounts> weights;  // one map per order
  std::vector<double> norms;
  double length = 0.0;
};

TfIdfVector tfidf(const Sentence& s, std::size_t max_n, const std::vector<std::map<std::vector<std::string>, double>>& df,
                  double log_docs) {
  TfIdfVector v;
  v.weights.resize(max_n);
  v.norms.assign(max_n, 0.0);
  v.length = static_cast<double>(s.size());
  for (std::size_t order = 1; order <= max_n; ++order) {
    for (const auto& [g, tf] : ngrams(s, order)) {
      auto it = df[order - 1].find(g);
      const double doc_freq = it == df[order - 1].end() ? 0.0 : it->second;
      const double w = tf * (log_docs - std::log(std::max(1.0, doc_freq)));
      v.weights[order - 1][g] = w;
      v.norms[order - 1] += w * w;
    }
    v.norms[order - 1] = std::sqrt(v.norms[order - 1]);
  }
  return v;
}

}  // namespace

CiderResult cider_d(std::span<const EvalPair> pairs, std::size_t max_n, double sigma) {
  check_pairs(pairs);
  if (max_n < 1) throw InvalidArgument("CIDEr order must be at least 1");
  if (!(sigma > 0.0)) throw InvalidArgument("CIDEr sigma must be positive");
  // Document frequency: number of clips whose reference set contains the n-gram.
  std::vector<std::map<std::vector<std::string>, double>> df(max_n);
  for (const EvalPair& p : pairs) {
    for (std::size_t order = 1; order <= max_n; ++order) {
      std::set<std::vector<std::string>> seen;
      for (const Sentence& r : p.references) {
        for (const auto& entry : ngrams(r, order)) seen.insert(entry.first);
      }
      for (const auto& g : seen) df[order - 1][g] += 1.0;
    }
  }
  const double log_docs = std::log(static_cast<double>(pairs.size()));

  CiderResult result;
  result.degenerate = pairs.size() == 1;
  double total = 0.0;
  for (const EvalPair& p : pairs) {
    const TfIdfVector cand = tfidf(p.candidate, max_n, df, log_docs);
    std::vector<double> per_order(max_n, 0.0);
    for (const Sentence& r : p.references) {
      const TfIdfVector ref = tfidf(r, max_n, df, log_docs);
      const double delta = cand.length - ref.length;
      const double penalty = std::exp(-(delta * delta) / (2.0 * sigma * sigma));
      for (std::size_t i = 0; i < max_n; ++i) {
        double dot = 0.0;
        for (const auto& [g, w] : cand.weights[i]) {
          auto it = ref.weights[i].find(g);
          if (it != ref.weights[i].end()) dot += std::min(w, it->second) * it->second;
        }
        if (cand.norms[i] != 0.0 && ref.norms[i] != 0.0) dot /= cand.norms[i] * ref.norms[i];
        per_order[i] += dot * penalty;
      }
    }
    double mean_order = 0.0;
    for (double v : per_order) mean_order += v;
    mean_order /= static_cast<double>(max_n);
    const double clip = 10.0 * mean_order / static_cast<double>(p.references.size());
    result.per_clip.push_back(clip);
    total += clip;
  }
  result.score = total / static_cast<double>(pairs.size());
  return result;
}

SpiderResult spider(double cider, std::optional<double> spice) {
  SpiderResult r;
  r.cider = cider;
  r.spice = spice;
  if (spice) r.spider = (cider + *spice) / 2.0;
  return r;
}

}  // namespace act
