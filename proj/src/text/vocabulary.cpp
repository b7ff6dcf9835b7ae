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

#include <algorithm>
#include <fstream>
#include <map>

#include "act/error.hpp"
#include "act/text/vocabulary.hpp"

namespace act {

namespace {
constexpr const char* kVocabMagic = "# act-vocab v";
}  // namespace

Vocabulary::Vocabulary() {
  for (const char* w : {"<pad>", "<sos>", "<eos>", "<unk>"}) add(w);
}

void Vocabulary::add(std::string word) {
  if (ids_.count(word)) throw InvalidArgument("duplicate vocabulary word: " + word);
  ids_.emplace(word, static_cast<int>(words_.size()));
  words_.push_back(std::move(word));
}

Vocabulary Vocabulary::build(std::span<const Sentence> corpus, std::size_t min_count) {
  if (corpus.empty()) throw InvalidArgument("build_vocabulary: empty corpus");
  if (min_count < 1) throw InvalidArgument("build_vocabulary: min_count must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& w : sentence) ++counts[w];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [w, c] : kept) {
    if (!vocab.find(w)) vocab.add(w);
  }
  return vocab;
}

Vocabulary Vocabulary::from_words(std::span<const std::string> words) {
  Vocabulary vocab;
  for (const auto& w : words) vocab.add(w);
  return vocab;
}

std::optional<int> Vocabulary::find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::id(std::string_view word) const { return find(word).value_or(kUnk); }

const std::string& Vocabulary::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) + " outside vocabulary of " +
                          std::to_string(words_.size()));
  }
  return words_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary: " + path.string());
  out << kVocabMagic << kFileVersion << '\n';
  out << "# line k after this header (k = 0, 1, ...) holds the word with id k + 4;"
         " ids 0-3 are <pad> <sos> <eos> <unk>\n";
  for (std::size_t i = kReserved; i < words_.size(); ++i) out << words_[i] << '\n';
  if (!out) throw IoError("failed writing vocabulary: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vocabulary: " + path.string());
  std::string line;
  const std::string magic = kVocabMagic;
  if (!std::getline(in, line) || line.rfind(magic, 0) != 0) {
    throw ValidationError(path.string() + ": missing vocabulary header");
  }
  const int version = std::stoi(line.substr(magic.size()));
  if (version > kFileVersion) {
    throw ValidationError(path.string() + ": vocabulary format v" + std::to_string(version) +
                          " is newer than supported v" + std::to_string(kFileVersion));
  }
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) {
    throw ValidationError(path.string() + ": missing id convention line");
  }
  std::vector<std::string> words;
  while (std::getline(in, line)) {
    if (line.empty()) throw ValidationError(path.string() + ": empty vocabulary line");
    words.push_back(line);
  }
  return from_words(words);
}

CaptionTokens encode(std::span<const std::string> words, const Vocabulary& vocab) {
  CaptionTokens tokens;
  tokens.ids.reserve(words.size() + 2);
  tokens.ids.push_back(Vocabulary::kSos);
  for (const auto& w : words) tokens.ids.push_back(vocab.id(w));
  tokens.ids.push_back(Vocabulary::kEos);
  return tokens;
}

Sentence decode(const CaptionTokens& tokens, const Vocabulary& vocab) {
  Sentence words;
  for (int id : tokens.ids) {
    const std::string& w = vocab.word(id);
    if (id == Vocabulary::kEos) break;
    if (id == Vocabulary::kPad || id == Vocabulary::kSos) continue;
    words.push_back(w);
  }
  return words;
}

}  // namespace act
