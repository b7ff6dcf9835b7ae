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

#include "act/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "act/error.hpp"
#include "act/numerics/ops.hpp"
#include "act/numerics/random.hpp"
#include "act/training/losses.hpp"

namespace act {

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  if (!(base_lr > 0.0)) throw InvalidArgument("base_lr must be positive");
  if (decay_every < 1) throw InvalidArgument("decay_every must be at least 1");
  if (patch_frames < 1) throw InvalidArgument("patch_frames must be at least 1");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw InvalidArgument("decay_factor must be in (0, 1]");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw InvalidArgument("label_smoothing must be in [0, 1)");
}

double lr_at_epoch(std::size_t epoch, const TrainConfig& cfg) {
  if (epoch < 1) throw InvalidArgument("epochs are 1-indexed");
  if (epoch <= cfg.warmup_epochs) {
    return cfg.base_lr * static_cast<double>(epoch) / static_cast<double>(cfg.warmup_epochs);
  }
  const auto steps = static_cast<double>((epoch - 1) / cfg.decay_every);
  if (steps == 0.0) return cfg.base_lr;
  // Divide by an integral reciprocal when there is one, so 1e-4 decays to
  // exactly the decimal values 1e-5, 1e-6, ...
  const double inverse = 1.0 / cfg.decay_factor;
  if (std::abs(inverse - std::round(inverse)) < 1e-9) return cfg.base_lr / std::pow(std::round(inverse), steps);
  return cfg.base_lr * std::pow(cfg.decay_factor, steps);
}

namespace {

// Stream ids for derive_seed, kept apart so shuffles, dropout and masks
// never share random draws.
constexpr std::uint64_t kShuffleStream = 0;
constexpr std::uint64_t kDropoutStream = 1;
constexpr std::uint64_t kAugmentStream = 2;

bool augmenting(const SpecAugmentPolicy& p) {
  return (p.num_time_masks > 0 && p.time_mask_width_max > 0) || (p.num_freq_masks > 0 && p.freq_mask_width_max > 0);
}

PatchSequence training_patches(const LogMelSpectrogram& spec, const TrainConfig& cfg, std::uint64_t augment_seed) {
  if (!augmenting(cfg.augment)) return patchify(spec, cfg.patch_frames);
  return patchify(spec_augment(spec, cfg.augment, augment_seed), cfg.patch_frames);
}

std::uint64_t epoch_seed(const TrainConfig& cfg, std::size_t epoch, std::uint64_t stream) {
  return derive_seed(derive_seed(cfg.seed, epoch), stream);
}

std::vector<std::size_t> shuffled_order(std::size_t n, const TrainConfig& cfg, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(epoch_seed(cfg, epoch, kShuffleStream));
  rng.shuffle(order);
  return order;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool is_encoder_param(const std::string& name) { return name.starts_with("encoder."); }

}  // namespace

Tensor caption_item_loss(const ModelParams& params, const PatchSequence& patches, std::span<const int> tokens,
                         double smoothing, const ForwardOptions& opts) {
  if (tokens.size() < 2) throw InvalidArgument("a caption needs at least <sos> and one target");
  Tensor memory = decoder_memory(encode(patches, params, opts), params);
  Tensor logits = decoder_forward(tokens.first(tokens.size() - 1), memory, params, opts);
  return label_smoothed_ce(logits, tokens.subspan(1), smoothing);
}

EpochStats train_caption_epoch(const ModelParams& params, const CaptionDataset& data, const TrainConfig& cfg,
                               AdamState& state, std::size_t epoch) {
  cfg.validate();
  if (data.items.empty()) throw InvalidArgument("caption dataset is empty");
  const auto start = std::chrono::steady_clock::now();
  EpochStats stats;
  stats.epoch = epoch;
  stats.lr = lr_at_epoch(epoch, cfg);

  const std::vector<std::size_t> order = shuffled_order(data.items.size(), cfg, epoch);
  Rng dropout_rng(epoch_seed(cfg, epoch, kDropoutStream));
  ForwardOptions opts{.train = true, .rng = &dropout_rng, .trace = nullptr};
  ParameterFilter filter;
  if (cfg.freeze_encoder) filter = [](const std::string& n) { return !is_encoder_param(n); };

  double loss_total = 0.0, nll_total = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    const double weight = 1.0 / static_cast<double>(end - begin);
    params.store().zero_grad();
    double batch_loss = 0.0;
    for (std::size_t pos = begin; pos < end; ++pos) {
      const CaptionItem& item = data.items[order[pos]];
      const PatchSequence patches = training_patches(
          data.features.at(item.clip), cfg, derive_seed(epoch_seed(cfg, epoch, kAugmentStream), pos));
      const std::span<const int> tokens(item.tokens);
      Tensor memory = decoder_memory(encode(patches, params, opts), params);
      Tensor logits = decoder_forward(tokens.first(tokens.size() - 1), memory, params, opts);
      Tensor loss = label_smoothed_ce(logits, tokens.subspan(1), cfg.label_smoothing);
      backward(scale(loss, weight));
      batch_loss += weight * loss.item();
      if (cfg.label_smoothing == 0.0) {
        nll_total += loss.item();
      } else {
        NoGradGuard no_grad;
        nll_total += label_smoothed_ce(logits.detach(), tokens.subspan(1), 0.0).item();
      }
    }
    adam_step(params.store(), state, stats.lr, filter);
    loss_total += batch_loss;
    ++batches;
  }
  params.store().zero_grad();
  stats.loss = loss_total / static_cast<double>(batches);
  stats.nll = nll_total / static_cast<double>(data.items.size());
  stats.seconds = seconds_since(start);
  return stats;
}

double evaluate_caption_loss(const ModelParams& params, const CaptionDataset& data, const TrainConfig& cfg,
                             double smoothing) {
  if (data.items.empty()) throw InvalidArgument("caption dataset is empty");
  NoGradGuard no_grad;
  double total = 0.0;
  for (const CaptionItem& item : data.items) {
    const PatchSequence patches = patchify(data.features.at(item.clip), cfg.patch_frames);
    total += caption_item_loss(params, patches, item.tokens, smoothing, {}).item();
  }
  return total / static_cast<double>(data.items.size());
}

EpochStats train_tagging_epoch(const ModelParams& params, const TagDataset& data, const TrainConfig& cfg,
                               AdamState& state, std::size_t epoch) {
  cfg.validate();
  if (data.features.empty()) throw InvalidArgument("tagging dataset is empty");
  if (data.labels.size() != data.features.size()) throw InvalidArgument("one label row per clip is required");
  const std::size_t k = params.config().encoder.num_tags;
  if (k == 0) throw InvalidArgument("tagging needs at least one class");
  const auto start = std::chrono::steady_clock::now();
  EpochStats stats;
  stats.epoch = epoch;
  stats.lr = lr_at_epoch(epoch, cfg);

  const std::vector<std::size_t> order = shuffled_order(data.features.size(), cfg, epoch);
  Rng dropout_rng(epoch_seed(cfg, epoch, kDropoutStream));
  ForwardOptions opts{.train = true, .rng = &dropout_rng, .trace = nullptr};
  const ParameterFilter filter = [](const std::string& n) {
    return is_encoder_param(n) || n.starts_with("tagging.");
  };

  double loss_total = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    const double weight = 1.0 / static_cast<double>(end - begin);
    params.store().zero_grad();
    double batch_loss = 0.0;
    for (std::size_t pos = begin; pos < end; ++pos) {
      const std::size_t clip = order[pos];
      if (data.labels[clip].size() != k) {
        throw InvalidArgument("clip " + data.ids.at(clip) + " has " + std::to_string(data.labels[clip].size()) +
                              " labels, model has " + std::to_string(k) + " classes");
      }
      const PatchSequence patches = training_patches(
          data.features[clip], cfg, derive_seed(epoch_seed(cfg, epoch, kAugmentStream), pos));
      Tensor encoded = encode(patches, params, opts);
      TagOutput out = tagging_head_forward(slice_rows(encoded, 0, 1), params);
      Tensor loss = bce_with_logits(out.logits, Tensor({1, k}, data.labels[clip]));
      backward(scale(loss, weight));
      batch_loss += weight * loss.item();
    }
    adam_step(params.store(), state, stats.lr, filter);
    loss_total += batch_loss;
    ++batches;
  }
  params.store().zero_grad();
  stats.loss = loss_total / static_cast<double>(batches);
  stats.seconds = seconds_since(start);
  return stats;
}

std::vector<EpochStats> pretrain_tagging(const ModelParams& params, const TagDataset& data, const TrainConfig& cfg,
                                         AdamState& state, const EpochCallback& on_epoch, std::size_t first_epoch) {
  std::vector<EpochStats> history;
  for (std::size_t e = first_epoch; e <= cfg.epochs; ++e) {
    history.push_back(train_tagging_epoch(params, data, cfg, state, e));
    if (on_epoch) on_epoch(history.back(), state);
  }
  return history;
}

std::vector<double> predict_tags(const ModelParams& params, const std::vector<LogMelSpectrogram>& features,
                                 std::size_t patch_frames) {
  NoGradGuard no_grad;
  std::vector<double> scores;
  for (const LogMelSpectrogram& spec : features) {
    Tensor encoded = encode(patchify(spec, patch_frames), params);
    TagOutput out = tagging_head_forward(slice_rows(encoded, 0, 1), params);
    scores.insert(scores.end(), out.probs.data().begin(), out.probs.data().end());
  }
  return scores;
}

}  // namespace act
