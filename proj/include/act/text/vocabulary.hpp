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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace act {

using Sentence = std::vector<std::string>;

// Lower-cases (Unicode simple case mapping), drops every character in a
// Unicode punctuation category and splits on whitespace runs.
Sentence tokenize_caption(std::string_view text);
std::string join_words(std::span<const std::string> words);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kSos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;
  static constexpr int kFileVersion = 1;

  // Reserved tokens only.
  Vocabulary();

  // Words seen at least min_count times, by descending frequency with ties
  // broken lexicographically.
  static Vocabulary build(std::span<const Sentence> corpus, std::size_t min_count);
  // Non-reserved words in id order.
  static Vocabulary from_words(std::span<const std::string> words);

  int id(std::string_view word) const;  // kUnk when absent
  std::optional<int> find(std::string_view word) const;
  const std::string& word(int id) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  void add(std::string word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

// <sos> w_1 ... w_n <eos>.
struct CaptionTokens {
  std::vector<int> ids;
  bool operator==(const CaptionTokens&) const = default;
};

CaptionTokens encode(std::span<const std::string> words, const Vocabulary& vocab);
// Drops <pad>/<sos> and stops at the first <eos>.
Sentence decode(const CaptionTokens& tokens, const Vocabulary& vocab);

}  // namespace act
