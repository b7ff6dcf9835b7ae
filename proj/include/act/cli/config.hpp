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

// Run configuration: a flat "key = value" text file. Lines starting with '#'
// are comments. Keys not listed in run_config_keys() are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "act/audio/frontend.hpp"
#include "act/model/params.hpp"
#include "act/training/trainer.hpp"

namespace act {

struct TextConfig {
  std::size_t min_count = 1;
  bool word2vec = true;  // initialise decoder word embeddings with skip-gram
  std::size_t word2vec_epochs = 5;
  std::size_t word2vec_window = 2;
  std::size_t word2vec_negatives = 5;
};

struct DecodeConfig {
  std::size_t beam_size = 5;
  std::size_t max_len = 22;
  bool length_norm = false;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  FrontendConfig frontend;
  ModelConfig model;
  TrainConfig train;
  TrainConfig pretrain;
  TextConfig text;
  DecodeConfig decode;
  std::size_t checkpoint_every = 10;
  double stop_loss = 0.0;  // end caption training once an epoch's loss drops below; 0 disables

  RunConfig();

  // Effective patch width and per-run seeds follow from the fields above.
  ModelConfig model_config(std::size_t vocab_size, std::size_t num_tags) const;
  TrainConfig caption_train_config() const;
  TrainConfig pretrain_config() const;
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string description;
};
const std::vector<ConfigKey>& run_config_keys();

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
// Every key with its current value; parse_run_config(to_text(c)) == c.
std::string run_config_to_text(const RunConfig& config);

}  // namespace act
