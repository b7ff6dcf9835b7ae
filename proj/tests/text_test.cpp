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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "act/error.hpp"
#include "act/numerics/random.hpp"
#include "act/text/skipgram.hpp"
#include "act/text/vocabulary.hpp"

using namespace act;

TEST_SUITE("text") {

TEST_CASE("tokenize_caption") {
  CHECK(tokenize_caption("A man speaks, loudly!") == Sentence{"a", "man", "speaks", "loudly"});
  CHECK(tokenize_caption("").empty());
  CHECK(tokenize_caption("Dog   barks") == Sentence{"dog", "barks"});
  CHECK(tokenize_caption("\tRain\nfalls ") == Sentence{"rain", "falls"});
  // Unicode punctuation (quotes, dashes, inverted marks) and case.
  CHECK(tokenize_caption("\xC2\xBFQU\xC3\x89? \xE2\x80\x9CW\xC3\x96RD\xE2\x80\x9D \xE2\x80\x94 ok") ==
        Sentence{"qu\xC3\xA9", "w\xC3\xB6rd", "ok"});
  // Symbols are not punctuation.
  CHECK(tokenize_caption("a+b") == Sentence{"a+b"});
  CHECK(tokenize_caption("don't") == Sentence{"dont"});
}

TEST_CASE("tokenize is idempotent") {
  Rng rng(3);
  const std::string alphabet[] = {"a", "B", " ", ",", ".", "!", "\xC3\x84", "-", "x", "  ", "\xE2\x80\x9C", "?"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = 0; i < 20; ++i) s += alphabet[rng.below(std::size(alphabet))];
    const Sentence once = tokenize_caption(s);
    CHECK(tokenize_caption(join_words(once)) == once);
  }
}

TEST_CASE("build_vocabulary") {
  const std::vector<Sentence> corpus = {{"a", "dog"}, {"a", "cat"}};
  SUBCASE("min_count 1") {
    Vocabulary v = Vocabulary::build(corpus, 1);
    CHECK(v.size() == 7);
    CHECK(v.id("a") == 4);
    CHECK(v.id("cat") == 5);
    CHECK(v.id("dog") == 6);
    CHECK(v.word(0) == "<pad>");
    CHECK(v.word(1) == "<sos>");
    CHECK(v.word(2) == "<eos>");
    CHECK(v.word(3) == "<unk>");
  }
  SUBCASE("min_count 2") {
    Vocabulary v = Vocabulary::build(corpus, 2);
    CHECK(v.size() == 5);
    CHECK(v.id("a") == 4);
    CHECK(v.id("cat") == Vocabulary::kUnk);
    CHECK(v.id("dog") == Vocabulary::kUnk);
  }
  SUBCASE("sentences without words keep the reserved ids") {
    const std::vector<Sentence> blank = {{}};
    Vocabulary v = Vocabulary::build(blank, 1);
    CHECK(v.size() == 4);
    CHECK(v.id("<eos>") == 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(Vocabulary::build(std::vector<Sentence>{}, 1), InvalidArgument);
    CHECK_THROWS_AS(Vocabulary::build(corpus, 0), InvalidArgument);
  }
  SUBCASE("ids are dense and bijective on random corpora") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Sentence> c(5);
      for (auto& s : c)
        for (int i = 0; i < 6; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng.below(10))));
      Vocabulary v = Vocabulary::build(c, 1 + rng.below(2));
      for (std::size_t id = 0; id < v.size(); ++id) CHECK(v.id(v.word(static_cast<int>(id))) == static_cast<int>(id));
    }
  }
}

TEST_CASE("encode / decode") {
  Vocabulary v = Vocabulary::from_words(std::vector<std::string>{"dog", "barks"});
  const Sentence words = {"dog", "barks"};
  CaptionTokens t = encode(words, v);
  CHECK(t.ids == std::vector<int>{1, v.id("dog"), v.id("barks"), 2});
  CHECK(decode(t, v) == words);
  CHECK(encode(Sentence{"cat"}, v).ids[1] == 3);
  CHECK_THROWS_AS(decode(CaptionTokens{{1, 99, 2}}, v), InvalidArgument);
  CHECK(decode(CaptionTokens{{1, 4, 2, 5}}, v) == Sentence{"dog"});
}

TEST_CASE("vocabulary file") {
  const auto path = std::filesystem::temp_directory_path() / "act_vocab_test.txt";
  Vocabulary v = Vocabulary::build(std::vector<Sentence>{{"rain", "falls", "rain"}}, 1);
  v.save(path);
  CHECK(Vocabulary::load(path) == v);
  {
    std::ofstream out(path);
    out << "# act-vocab v9\n# header\nword\n";
  }
  CHECK_THROWS_AS(Vocabulary::load(path), ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("skip-gram") {
  SUBCASE("pair enumeration") {
    const std::vector<int> s = {10, 11, 12};
    const auto pairs = skipgram_pairs(s, 2);
    const std::vector<std::pair<int, int>> expected = {{10, 11}, {10, 12}, {11, 10}, {11, 12}, {12, 10}, {12, 11}};
    CHECK(pairs == expected);
  }

  std::vector<Sentence> corpus;
  for (int i = 0; i < 40; ++i) {
    corpus.push_back({"the", "cat", "dog", "sleep"});
    corpus.push_back({"a", "car", "road", "drive"});
  }
  Vocabulary vocab = Vocabulary::build(corpus, 1);
  SkipGramConfig cfg;
  cfg.dim = 16;
  cfg.window = 2;
  cfg.negatives = 3;
  cfg.epochs = 15;
  cfg.seed = 4;

  SUBCASE("co-occurring words end up closer") {
    WordEmbeddings emb = train_skipgram(corpus, vocab, cfg);
    CHECK(emb.rows == vocab.size());
    auto row = [&](const char* w) { return emb.row(static_cast<std::size_t>(vocab.id(w))); };
    CHECK(cosine_similarity(row("cat"), row("dog")) > cosine_similarity(row("cat"), row("car")));
    for (double x : emb.matrix) CHECK(std::isfinite(x));
  }
  SUBCASE("probe loss decreases over epochs") {
    SkipGramTrace trace;
    cfg.epochs = 6;
    train_skipgram(corpus, vocab, cfg, &trace);
    REQUIRE(trace.probe_loss.size() == 6);
    for (std::size_t e = 1; e < 6; ++e) CHECK(trace.probe_loss[e] < trace.probe_loss[e - 1]);
  }
  SUBCASE("deterministic per seed") {
    CHECK(train_skipgram(corpus, vocab, cfg).matrix == train_skipgram(corpus, vocab, cfg).matrix);
  }
  SUBCASE("errors") {
    const std::vector<Sentence> tiny = {{"cat"}};
    cfg.window = 2;
    CHECK_THROWS_AS(train_skipgram(tiny, vocab, cfg), InvalidArgument);
    cfg.window = 0;
    CHECK_THROWS_AS(train_skipgram(corpus, vocab, cfg), InvalidArgument);
    cfg.window = 1;
    cfg.negatives = 0;
    CHECK_THROWS_AS(train_skipgram(corpus, vocab, cfg), InvalidArgument);
  }
}

}  // TEST_SUITE
