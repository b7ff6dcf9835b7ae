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
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "act/audio/frontend.hpp"
#include "act/model/model.hpp"
#include "act/model/params.hpp"
#include "act/numerics/optim.hpp"

namespace act {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double base_lr = 1e-4;
  std::size_t warmup_epochs = 5;
  std::size_t decay_every = 10;
  double decay_factor = 0.1;
  double label_smoothing = 0.1;
  std::uint64_t seed = 1;
  bool freeze_encoder = false;
  std::size_t patch_frames = 4;
  SpecAugmentPolicy augment;  // all-zero policy disables augmentation

  void validate() const;
};

// Warmup ramp base*e/warmup up to the warmup epoch, then one decay by
// decay_factor per completed block of decay_every epochs counted from 1
// (boundaries at 11, 21, ... with the defaults). `epoch` is 1-indexed.
double lr_at_epoch(std::size_t epoch, const TrainConfig& cfg);

// One caption per item; several items may share a clip.
struct CaptionItem {
  std::size_t clip = 0;
  std::vector<int> tokens;  // <sos> ... <eos>
};

struct CaptionDataset {
  std::vector<std::string> ids;
  std::vector<LogMelSpectrogram> features;
  std::vector<CaptionItem> items;
};

struct TagDataset {
  std::vector<std::string> ids;
  std::vector<LogMelSpectrogram> features;
  std::vector<std::vector<double>> labels;  // clips x classes, entries 0 or 1
};

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss = 0.0;  // mean batch objective
  double nll = 0.0;   // mean unsmoothed cross entropy (caption only)
  double seconds = 0.0;
};

// Teacher-forced loss of one caption under the current weights.
Tensor caption_item_loss(const ModelParams& params, const PatchSequence& patches, std::span<const int> tokens,
                         double smoothing, const ForwardOptions& opts);

// One pass over the shuffled items with one Adam step per batch.
EpochStats train_caption_epoch(const ModelParams& params, const CaptionDataset& data, const TrainConfig& cfg,
                               AdamState& state, std::size_t epoch);

// Mean per-item loss with dropout off.
double evaluate_caption_loss(const ModelParams& params, const CaptionDataset& data, const TrainConfig& cfg,
                             double smoothing);

EpochStats train_tagging_epoch(const ModelParams& params, const TagDataset& data, const TrainConfig& cfg,
                               AdamState& state, std::size_t epoch);

using EpochCallback = std::function<void(const EpochStats&, const AdamState&)>;

// Tagging pretraining of the encoder and tagging head for cfg.epochs epochs.
std::vector<EpochStats> pretrain_tagging(const ModelParams& params, const TagDataset& data, const TrainConfig& cfg,
                                         AdamState& state, const EpochCallback& on_epoch = {},
                                         std::size_t first_epoch = 1);

// Per-clip tag probabilities, clips x classes, row-major.
std::vector<double> predict_tags(const ModelParams& params, const std::vector<LogMelSpectrogram>& features,
                                 std::size_t patch_frames);

}  // namespace act
