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

#include "act/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "act/error.hpp"

namespace act {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::optional<double> MetricReport::find(const std::string& metric) const {
  for (const auto& [name, value] : corpus) {
    if (name == metric) return value;
  }
  return std::nullopt;
}

std::string MetricReport::to_text() const {
  std::ostringstream out;
  out << "# act-metric-report v" << kMetricReportVersion << '\n';
  for (const auto& [k, v] : metadata) out << "meta." << k << '=' << fixed6(v) << '\n';
  for (const auto& [k, v] : corpus) out << k << '=' << fixed6(v) << '\n';
  for (const auto& [k, why] : unavailable) out << k << "=unavailable (" << why << ")\n";
  for (const ClipScores& c : clips) {
    for (const auto& [k, v] : c.scores) out << "clip." << c.id << '.' << k << '=' << fixed6(v) << '\n';
  }
  return out.str();
}

std::string MetricReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "act-metric-report";
  doc["version"] = kMetricReportVersion;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  doc["metadata"] = meta;
  ordered_json scores = ordered_json::object();
  for (const auto& [k, v] : corpus) scores[k] = v;
  doc["corpus"] = scores;
  ordered_json missing = ordered_json::object();
  for (const auto& [k, why] : unavailable) missing[k] = why;
  doc["unavailable"] = missing;
  ordered_json per_clip = ordered_json::array();
  for (const ClipScores& c : clips) {
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : c.scores) s[k] = v;
    per_clip.push_back({{"id", c.id}, {"scores", s}});
  }
  doc["clips"] = per_clip;
  return doc.dump(2) + "\n";
}

MetricReport evaluate_captions(std::span<const std::string> ids, std::span<const EvalPair> input,
                               std::optional<double> spice) {
  if (ids.size() != input.size()) throw InvalidArgument("one id per evaluated clip is required");
  if (input.empty()) throw InvalidArgument("no candidates to evaluate");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::vector<EvalPair> pairs;
  std::vector<std::string> sorted_ids;
  for (std::size_t i : order) {
    pairs.push_back(input[i]);
    sorted_ids.push_back(ids[i]);
  }

  MetricReport report;
  report.metadata = {{"clips", static_cast<double>(pairs.size())}, {"bleu_max_order", 4.0},
                     {"cider_max_order", 4.0}, {"cider_sigma", 6.0}, {"rouge_beta", 1.2}};
  for (std::size_t n = 1; n <= 4; ++n) report.corpus.emplace_back("BLEU_" + std::to_string(n), bleu(pairs, n));
  report.corpus.emplace_back("ROUGE_L", rouge_l(pairs));
  const CiderResult cider = cider_d(pairs);
  report.corpus.emplace_back("CIDEr", cider.score);
  const SpiderResult sp = spider(cider.score, spice);
  if (sp.spider) {
    report.corpus.emplace_back("SPICE", *sp.spice);
    report.corpus.emplace_back("SPIDEr", *sp.spider);
  } else {
    report.unavailable.emplace_back("SPICE", kSpiceUnavailable);
    report.unavailable.emplace_back("SPIDEr", std::string(kSpiceUnavailable) + ", CIDEr-only score reported");
  }
  report.unavailable.emplace_back("METEOR", "not computed");
  // A one-clip corpus zeroes every IDF weight; flagged rather than refused.
  report.metadata.emplace_back("cider_single_clip", cider.degenerate ? 1.0 : 0.0);

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ClipScores c{sorted_ids[i], {}};
    const std::span<const EvalPair> one(&pairs[i], 1);
    for (std::size_t n = 1; n <= 4; ++n) c.scores.emplace_back("BLEU_" + std::to_string(n), bleu(one, n));
    c.scores.emplace_back("ROUGE_L", rouge_l_clip(pairs[i]));
    c.scores.emplace_back("CIDEr", cider.per_clip[i]);
    report.clips.push_back(std::move(c));
  }
  return report;
}

}  // namespace act
