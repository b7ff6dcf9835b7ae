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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "act/cli/config.hpp"
#include "act/cli/manifest.hpp"
#include "act/metrics/report.hpp"
#include "act/numerics/gradcheck.hpp"
#include "act/training/trainer.hpp"

namespace act {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // command ran but its check failed
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitIo = 4;

// Environment variable naming the default data directory.
inline constexpr const char* kDataDirEnv = "ACT_DATA_DIR";
std::filesystem::path default_data_dir();

struct SynthDataResult {
  std::filesystem::path caption_manifest;
  std::filesystem::path tag_manifest;
  std::size_t clips = 0;
};

// Writes clips/<id>.wav plus captions.jsonl and tags.jsonl under out_dir.
SynthDataResult synth_data(std::size_t count, std::uint64_t seed, const std::filesystem::path& out_dir,
                           std::size_t max_events = 3);

enum class TrainMode { kCaption, kPretrainTagging };

struct TrainRequest {
  RunConfig config;
  std::filesystem::path manifest;
  TrainMode mode = TrainMode::kCaption;
  std::optional<std::filesystem::path> init;  // tagging checkpoint for the encoder
  bool resume = false;                        // continue from out_dir/checkpoint_latest.act
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainOutcome {
  std::vector<EpochStats> history;  // epochs run by this call
  std::filesystem::path checkpoint;
  std::vector<std::string> tag_classes;
};

// Checkpoints go to config.out_dir: checkpoint_latest.act every
// checkpoint_every epochs and model.act at the end, with one JSON line per
// epoch appended to train_log.jsonl.
TrainOutcome train_model(const TrainRequest& request);

// Features of every record, in record order.
std::vector<LogMelSpectrogram> manifest_features(const Manifest& manifest, const FrontendConfig& frontend);

using CaptionLines = std::vector<std::pair<std::string, std::string>>;  // id, caption

// Captions for a wav file or every clip of a manifest, sorted by clip id.
CaptionLines caption_clips(const std::filesystem::path& checkpoint, const std::filesystem::path& input,
                           std::optional<std::size_t> beam_size = std::nullopt);
void write_caption_lines(const std::filesystem::path& path, const CaptionLines& lines);
CaptionLines read_caption_lines(const std::filesystem::path& path);

MetricReport evaluate_files(const std::filesystem::path& candidates, const std::filesystem::path& references,
                            std::optional<double> spice = std::nullopt);

// Full-model gradient check on a tiny double-precision configuration.
GradCheckResult run_gradcheck(std::uint64_t seed, bool corrupt_backward = false);
inline constexpr double kGradcheckTolerance = 1e-4;

// Entry point of the act command-line tool.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace act
