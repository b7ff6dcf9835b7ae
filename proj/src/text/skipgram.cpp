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

#include "act/text/skipgram.hpp"

#include <algorithm>
#include <cmath>

#include "act/error.hpp"
#include "act/numerics/random.hpp"

namespace act {

namespace {

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Draws ids from the unigram^0.75 distribution over non-reserved words.
class NoiseSampler {
 public:
  NoiseSampler(std::span<const std::vector<int>> sentences, std::size_t vocab_size) {
    std::vector<double> counts(vocab_size, 0.0);
    for (const auto& s : sentences)
      for (int id : s) counts[static_cast<std::size_t>(id)] += 1.0;
    double total = 0.0;
    for (std::size_t id = Vocabulary::kReserved; id < vocab_size; ++id) {
      if (counts[id] == 0.0) continue;
      total += std::pow(counts[id], 0.75);
      ids_.push_back(static_cast<int>(id));
      cumulative_.push_back(total);
    }
    if (ids_.empty()) throw InvalidArgument("train_skipgram: corpus has no in-vocabulary words");
    for (double& c : cumulative_) c /= total;
  }

  int sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return ids_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::vector<int> ids_;
  std::vector<double> cumulative_;
};

struct Sample {
  int center;
  int context;
  std::vector<int> negatives;
};

double sample_loss(const Sample& s, const std::vector<double>& in, const std::vector<double>& out, std::size_t dim) {
  const double* v = in.data() + static_cast<std::size_t>(s.center) * dim;
  double loss = -log_sigmoid(dot(v, out.data() + static_cast<std::size_t>(s.context) * dim, dim));
  for (int neg : s.negatives) loss -= log_sigmoid(-dot(v, out.data() + static_cast<std::size_t>(neg) * dim, dim));
  return loss;
}

}  // namespace

std::vector<std::pair<int, int>> skipgram_pairs(std::span<const int> sentence, std::size_t window) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(sentence.size() - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) pairs.emplace_back(sentence[i], sentence[j]);
    }
  }
  return pairs;
}

WordEmbeddings train_skipgram(std::span<const Sentence> corpus, const Vocabulary& vocab, const SkipGramConfig& cfg,
                              SkipGramTrace* trace) {
  if (cfg.window < 1) throw InvalidArgument("train_skipgram: window must be at least 1");
  if (cfg.negatives < 1) throw InvalidArgument("train_skipgram: negatives must be at least 1");
  if (cfg.dim < 1) throw InvalidArgument("train_skipgram: embedding width must be positive");
  std::vector<std::vector<int>> sentences;
  std::size_t tokens = 0;
  for (const auto& s : corpus) {
    std::vector<int> ids;
    for (const auto& w : s) ids.push_back(vocab.id(w));
    tokens += ids.size();
    sentences.push_back(std::move(ids));
  }
  if (tokens < cfg.window) {
    throw InvalidArgument("train_skipgram: corpus of " + std::to_string(tokens) + " tokens is smaller than window " +
                          std::to_string(cfg.window));
  }

  const std::size_t dim = cfg.dim, rows = vocab.size();
  Rng rng(cfg.seed);
  WordEmbeddings emb{rows, dim, std::vector<double>(rows * dim)};
  for (double& w : emb.matrix) w = rng.uniform(-0.5, 0.5) / static_cast<double>(dim);
  std::vector<double> out(rows * dim, 0.0);
  const NoiseSampler noise(sentences, rows);

  auto draw = [&](int center, int context, Rng& r) {
    Sample s{center, context, {}};
    while (s.negatives.size() < cfg.negatives) {
      // Retry draws that hit the context word; a corpus with a single word
      // type has no other choice, so give up after a few attempts.
      int n = noise.sample(r);
      for (int tries = 0; n == context && tries < 8; ++tries) n = noise.sample(r);
      s.negatives.push_back(n);
    }
    return s;
  };

  std::vector<Sample> probe;
  {
    Rng probe_rng(derive_seed(cfg.seed, 0xC0FFEE));
    for (const auto& s : sentences) {
      if (s.size() < 2) continue;
      for (auto [c, x] : skipgram_pairs(s, cfg.window)) probe.push_back(draw(c, x, probe_rng));
      break;
    }
  }

  std::size_t total_steps = 0;
  for (const auto& s : sentences) total_steps += skipgram_pairs(s, cfg.window).size();
  total_steps *= cfg.epochs;

  std::vector<double> grad_in(dim);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (const auto& s : sentences) {
      for (auto [center, context] : skipgram_pairs(s, cfg.window)) {
        const double lr = cfg.learning_rate *
                          std::max(1e-4, 1.0 - static_cast<double>(step++) / static_cast<double>(total_steps));
        Sample sample = draw(center, context, rng);
        epoch_loss += sample_loss(sample, emb.matrix, out, dim);
        ++seen;
        double* v = emb.matrix.data() + static_cast<std::size_t>(center) * dim;
        std::fill(grad_in.begin(), grad_in.end(), 0.0);
        auto update = [&](int target, double label) {
          double* u = out.data() + static_cast<std::size_t>(target) * dim;
          const double g = lr * (label - sigmoid(dot(v, u, dim)));
          for (std::size_t k = 0; k < dim; ++k) {
            grad_in[k] += g * u[k];
            u[k] += g * v[k];
          }
        };
        update(context, 1.0);
        for (int neg : sample.negatives) update(neg, 0.0);
        for (std::size_t k = 0; k < dim; ++k) v[k] += grad_in[k];
      }
    }
    if (trace) {
      trace->epoch_loss.push_back(seen ? epoch_loss / static_cast<double>(seen) : 0.0);
      double probe_total = 0.0;
      for (const auto& p : probe) probe_total += sample_loss(p, emb.matrix, out, dim);
      trace->probe_loss.push_back(probe.empty() ? 0.0 : probe_total / static_cast<double>(probe.size()));
    }
  }
  return emb;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("cosine_similarity: length mismatch");
  const double ab = dot(a.data(), b.data(), a.size());
  const double na = std::sqrt(dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(dot(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return ab / (na * nb);
}

}  // namespace act
