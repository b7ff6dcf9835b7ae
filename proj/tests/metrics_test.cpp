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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "act/error.hpp"
#include "act/metrics/caption_metrics.hpp"
#include "act/metrics/report.hpp"
#include "act/metrics/tagging_metrics.hpp"
#include "act/numerics/random.hpp"

using namespace act;

namespace {

// Straightforward re-derivations used as oracles.
namespace naive {

using Gram = std::vector<std::string>;

std::map<Gram, double> grams(const Sentence& s, std::size_t n) {
  std::map<Gram, double> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out[Gram(s.begin() + i, s.begin() + i + n)] += 1.0;
  return out;
}

double bleu(const std::vector<EvalPair>& corpus, std::size_t order) {
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    double hit = 0.0, total = 0.0;
    for (const EvalPair& p : corpus) {
      for (const auto& [g, c] : grams(p.candidate, n)) {
        double cap = 0.0;
        for (const Sentence& r : p.references) {
          auto rg = grams(r, n);
          cap = std::max(cap, rg.count(g) ? rg[g] : 0.0);
        }
        hit += std::min(c, cap);
        total += c;
      }
    }
    if (hit == 0.0) return 0.0;
    log_sum += std::log(hit / total);
  }
  double c = 0.0, r = 0.0;
  for (const EvalPair& p : corpus) {
    c += static_cast<double>(p.candidate.size());
    double best = 1e9;
    for (const Sentence& ref : p.references) {
      const double len = static_cast<double>(ref.size());
      const double gap = std::fabs(len - static_cast<double>(p.candidate.size()));
      const double best_gap = std::fabs(best - static_cast<double>(p.candidate.size()));
      if (gap < best_gap || (gap == best_gap && len < best)) best = len;
    }
    r += best;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / static_cast<double>(order));
}

bool is_subsequence(const Sentence& sub, const Sentence& of) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < of.size() && j < sub.size(); ++i) j += of[i] == sub[j];
  return j == sub.size();
}

// LCS by trying every subsequence of the candidate.
double lcs(const Sentence& a, const Sentence& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    Sentence sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return static_cast<double>(best);
}

double rouge(const std::vector<EvalPair>& corpus) {
  double sum = 0.0;
  for (const EvalPair& p : corpus) {
    double best = 0.0;
    for (const Sentence& r : p.references) {
      const double l = lcs(p.candidate, r);
      if (l == 0.0) continue;
      const double prec = l / static_cast<double>(p.candidate.size()), rec = l / static_cast<double>(r.size());
      best = std::max(best, (1 + 1.44) * prec * rec / (rec + 1.44 * prec));
    }
    sum += best;
  }
  return sum / static_cast<double>(corpus.size());
}

std::vector<double> cider(const std::vector<EvalPair>& corpus) {
  std::map<Gram, double> df;
  for (const EvalPair& p : corpus) {
    std::set<Gram> seen;
    for (const Sentence& r : p.references) {
      for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& kv : grams(r, n)) seen.insert(kv.first);
      }
    }
    for (const Gram& g : seen) df[g] += 1.0;
  }
  const double log_docs = std::log(static_cast<double>(corpus.size()));
  auto weight = [&](const Gram& g, double tf) { return tf * (log_docs - std::log(std::max(1.0, df[g]))); };
  std::vector<double> out;
  for (const EvalPair& p : corpus) {
    double total = 0.0;
    for (const Sentence& r : p.references) {
      const double delta = static_cast<double>(p.candidate.size()) - static_cast<double>(r.size());
      const double penalty = std::exp(-delta * delta / 72.0);
      for (std::size_t n = 1; n <= 4; ++n) {
        auto cg = grams(p.candidate, n), rg = grams(r, n);
        double dot = 0.0, nc = 0.0, nr = 0.0;
        for (const auto& [g, tf] : cg) {
          const double wc = weight(g, tf);
          const double wr = rg.count(g) ? weight(g, rg[g]) : 0.0;
          dot += std::min(wc, wr) * wr;
          nc += wc * wc;
        }
        for (const auto& [g, tf] : rg) nr += weight(g, tf) * weight(g, tf);
        double cos = dot;
        if (nc > 0.0 && nr > 0.0) cos /= std::sqrt(nc) * std::sqrt(nr);
        total += cos * penalty / 4.0;
      }
    }
    out.push_back(10.0 * total / static_cast<double>(p.references.size()));
  }
  return out;
}

double ap(const std::vector<double>& s, const std::vector<double>& y) {
  double sum = 0.0, pos = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1.0) continue;
    pos += 1.0;
    // Rank of i: strictly higher scores, plus equal scores placed earlier.
    double rank = 1.0, above = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i) continue;
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) {
        rank += 1.0;
        above += y[j];
      }
    }
    sum += above / rank;
  }
  return sum / pos;
}

}  // namespace naive

Sentence words(const std::string& text) {
  Sentence out;
  std::string cur;
  for (char ch : text) {
    if (ch == ' ') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

Sentence random_sentence(Rng& rng, std::size_t min_len, std::size_t max_len) {
  static const char* lexicon[] = {"a", "dog", "barks", "the", "rain", "falls", "loudly"};
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  Sentence s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(lexicon[rng.below(7)]);
  return s;
}

std::vector<EvalPair> random_corpus(std::uint64_t seed, std::size_t clips = 5) {
  Rng rng(seed);
  std::vector<EvalPair> out(clips);
  for (EvalPair& p : out) {
    p.candidate = random_sentence(rng, 4, 9);
    const std::size_t refs = 1 + rng.below(5);
    for (std::size_t r = 0; r < refs; ++r) p.references.push_back(random_sentence(rng, 4, 9));
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("BLEU") {
  const std::vector<EvalPair> one = {{words("a cat sits"), {words("a cat sits down")}}};
  CHECK(bleu(one, 1) == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)).epsilon(1e-15));
  CHECK(std::fabs(bleu(one, 1) - 0.71653) < 1e-5);

  const std::vector<EvalPair> same = {{words("a dog barks loudly"), {words("a dog barks loudly")}},
                                      {words("rain falls on the roof"), {words("rain falls on the roof")}}};
  for (std::size_t n = 1; n <= 4; ++n) CHECK(bleu(same, n) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<EvalPair> disjoint = {{words("x y z"), {words("a b c")}}};
  CHECK(bleu(disjoint, 1) == 0.0);
  // Clipping: "the the the" against "the cat" keeps one match out of three.
  const std::vector<EvalPair> clip = {{words("the the the"), {words("the cat sat")}}};
  CHECK(bleu(clip, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Closest reference length, ties to the shorter one.
  const std::vector<EvalPair> ties = {{words("a b c"), {words("a b"), words("a b c d")}}};
  CHECK(bleu(ties, 1) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<EvalPair> longer = {{words("a b c"), {words("a b c d e")}}};
  CHECK(bleu(longer, 1) == doctest::Approx(std::exp(1.0 - 5.0 / 3.0)).epsilon(1e-15));

  const std::vector<EvalPair> no_fourgram = {{words("a b c d"), {words("a b c x")}}};
  CHECK(bleu(no_fourgram, 4) == 0.0);
  CHECK(bleu(no_fourgram, 4, BleuSmoothing::kAddOne) > 0.0);
  CHECK(bleu(no_fourgram, 4, BleuSmoothing::kAddOne) ==
        doctest::Approx(std::pow(0.75 * (3.0 / 4.0) * (2.0 / 3.0) * (1.0 / 2.0), 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(bleu(std::vector<EvalPair>{}, 4), InvalidArgument);
  CHECK_THROWS_AS(bleu(std::vector<EvalPair>{{words("a"), {}}}, 1), InvalidArgument);
}

TEST_CASE("ROUGE-L") {
  const EvalPair p{words("a b c d"), {words("a c d")}};
  // P = 3/4, R = 1.
  const double f = 2.44 * 0.75 / (1.0 + 1.44 * 0.75);
  CHECK(rouge_l_clip(p) == doctest::Approx(f).epsilon(1e-15));
  CHECK(rouge_l_clip(p) == doctest::Approx(0.879808).epsilon(1e-6));
  CHECK(rouge_l_clip({words("a b"), {words("a b")}}) == 1.0);
  CHECK(rouge_l_clip({words("a b"), {words("c d")}}) == 0.0);
  CHECK(rouge_l_clip({Sentence{}, {words("c d")}}) == 0.0);
  CHECK(rouge_l_clip({words("a b c"), {words("x y"), words("a b c")}}) == 1.0);
  CHECK(lcs_length(words("a b c b d a b"), words("b d c a b a")) == 4);
}

TEST_CASE("CIDEr-D") {
  const std::vector<EvalPair> distinct = {{words("a dog barks loudly"), {words("a dog barks loudly")}},
                                          {words("rain falls on the roof"), {words("rain falls on the roof")}},
                                          {words("birds sing at dawn"), {words("birds sing at dawn")}}};
  const CiderResult r = cider_d(distinct);
  for (double v : r.per_clip) CHECK(std::fabs(v - 10.0) < 1e-9);
  CHECK(std::fabs(r.score - 10.0) < 1e-9);
  CHECK_FALSE(r.degenerate);

  std::vector<EvalPair> none = distinct;
  none[0].candidate = words("zz yy xx");
  CHECK(cider_d(none).per_clip[0] == 0.0);

  // Repeating the candidate never beats the exact candidate.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<EvalPair> c = random_corpus(seed);
    for (EvalPair& p : c) p.candidate = p.references.front();
    const std::vector<double> base = cider_d(c).per_clip;
    for (EvalPair& p : c) p.candidate.insert(p.candidate.end(), p.candidate.begin(), p.candidate.end());
    const std::vector<double> doubled = cider_d(c).per_clip;
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(doubled[i] <= base[i] + 1e-12);
  }

  const CiderResult single = cider_d(std::vector<EvalPair>{distinct[0]});
  CHECK(single.degenerate);
  CHECK(single.score == 0.0);
}

TEST_CASE("metrics agree with naive evaluators") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const std::vector<EvalPair> c = random_corpus(seed);
    CAPTURE(seed);
    for (std::size_t n = 1; n <= 4; ++n) CHECK(bleu(c, n) == doctest::Approx(naive::bleu(c, n)).epsilon(1e-13));
    CHECK(rouge_l(c) == doctest::Approx(naive::rouge(c)).epsilon(1e-13));
    const std::vector<double> want = naive::cider(c);
    const CiderResult got = cider_d(c);
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::fabs(got.per_clip[i] - want[i]) < 1e-9);
  }
}

TEST_CASE("clip order does not matter") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<EvalPair> c = random_corpus(seed, 6);
    const double b = bleu(c, 4, BleuSmoothing::kAddOne), r = rouge_l(c), d = cider_d(c).score;
    std::reverse(c.begin(), c.end());
    std::rotate(c.begin(), c.begin() + 2, c.end());
    CHECK(bleu(c, 4, BleuSmoothing::kAddOne) == doctest::Approx(b).epsilon(1e-14));
    CHECK(rouge_l(c) == doctest::Approx(r).epsilon(1e-14));
    CHECK(cider_d(c).score == doctest::Approx(d).epsilon(1e-14));
  }
}

TEST_CASE("SPIDEr") {
  const SpiderResult s = spider(0.679, 0.160);
  REQUIRE(s.spider);
  CHECK(*s.spider == doctest::Approx(0.4195).epsilon(1e-15));
  CHECK(*spider(0.3, 0.3).spider == doctest::Approx(0.3));
  CHECK(*spider(0.0, 0.0).spider == 0.0);
  CHECK_FALSE(spider(0.5, std::nullopt).spider.has_value());
}

TEST_CASE("average precision") {
  CHECK(average_precision(std::vector<double>{0.9, 0.5, 0.1}, std::vector<double>{1, 0, 1}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(average_precision(std::vector<double>{0.9, 0.6, 0.3, 0.1}, std::vector<double>{0, 0, 0, 1}) == 0.25);
  CHECK(average_precision(std::vector<double>{0.2, 0.9, 0.1}, std::vector<double>{1, 1, 0}) == 1.0);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(9), y(9);
    for (std::size_t i = 0; i < 9; ++i) {
      s[i] = static_cast<double>(rng.below(4));  // frequent ties
      y[i] = static_cast<double>(rng.below(2));
    }
    y[rng.below(9)] = 1.0;
    CHECK(average_precision(s, y) == doctest::Approx(naive::ap(s, y)).epsilon(1e-14));
  }
  // Second class has no positives and is skipped.
  const std::vector<double> scores = {0.9, 0.1, 0.5, 0.2, 0.1, 0.3};
  const std::vector<double> labels = {1, 0, 0, 0, 1, 0};
  CHECK(mean_average_precision(scores, labels, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(mean_average_precision(scores, std::vector<double>(6, 0.0), 2), InvalidArgument);
}

TEST_CASE("metric report") {
  const std::vector<std::string> ids = {"b", "a"};
  const std::vector<EvalPair> pairs = {{words("a dog barks"), {words("a dog barks")}},
                                       {words("rain falls"), {words("rain falls hard")}}};
  const MetricReport r = evaluate_captions(ids, pairs);
  CHECK(r.clips.front().id == "a");
  const std::string text = r.to_text();
  CHECK(text.find("SPICE=unavailable (SPICE unavailable)") != std::string::npos);
  CHECK(text.find("SPIDEr=unavailable") != std::string::npos);
  CHECK(text.find("METEOR=unavailable") != std::string::npos);
  CHECK(text.find("CIDEr=") != std::string::npos);
  CHECK_FALSE(r.find("SPIDEr").has_value());
  CHECK(r.to_json().find("\"schema\": \"act-metric-report\"") != std::string::npos);

  const std::vector<std::string> swapped_ids = {"a", "b"};
  const std::vector<EvalPair> swapped = {pairs[1], pairs[0]};
  CHECK(evaluate_captions(swapped_ids, swapped).to_text() == text);

  const MetricReport with = evaluate_captions(ids, pairs, 0.2);
  REQUIRE(with.find("SPIDEr").has_value());
  CHECK(*with.find("SPIDEr") == doctest::Approx((*with.find("CIDEr") + 0.2) / 2.0));
  for (const auto& [k, v] : with.corpus) {
    CHECK(v >= 0.0);
    if (k.starts_with("BLEU") || k == "ROUGE_L") CHECK(v <= 1.0);
  }
}

}
