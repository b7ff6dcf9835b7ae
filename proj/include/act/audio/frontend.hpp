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
#include <span>
#include <vector>

namespace act {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 32000;
};

struct FrontendConfig {
  int sample_rate = 32000;
  double clip_seconds = 10.0;
  std::size_t window = 1024;  // Hann window and FFT length
  std::size_t hop = 512;
  std::size_t mel_bins = 64;
  double log_floor = 1e-10;
  std::size_t patch_frames = 4;
};

// Row-major frames x mel_bins matrix of log mel energies.
struct LogMelSpectrogram {
  std::size_t frames = 0;
  std::size_t mel_bins = 0;
  std::size_t hop = 0;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t bin) const { return values[frame * mel_bins + bin]; }
  double& at(std::size_t frame, std::size_t bin) { return values[frame * mel_bins + bin]; }
};

// N non-overlapping, time-ordered patches of frames_per_patch x mel_bins,
// each flattened time-major.
struct PatchSequence {
  std::size_t count = 0;
  std::size_t frames_per_patch = 0;
  std::size_t mel_bins = 0;
  std::vector<double> values;

  std::size_t patch_dim() const { return frames_per_patch * mel_bins; }
  std::span<const double> patch(std::size_t i) const {
    return std::span<const double>(values).subspan(i * patch_dim(), patch_dim());
  }
};

struct SpecAugmentPolicy {
  std::size_t time_mask_width_max = 0;
  std::size_t freq_mask_width_max = 0;
  std::size_t num_time_masks = 0;
  std::size_t num_freq_masks = 0;
  double mask_value = 0.0;
};

struct MaskBand {
  enum class Axis { kTime, kFrequency };
  Axis axis = Axis::kTime;
  std::size_t start = 0;
  std::size_t width = 0;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Linear-interpolation resampling.
Waveform resample_linear(const Waveform& in, int target_rate);
// Resamples to cfg.sample_rate, then zero-pads or truncates to cfg.clip_seconds.
Waveform prepare_waveform(const Waveform& in, const FrontendConfig& cfg);

// Triangular, area-normalised filters on a mel-spaced grid from 0 Hz to
// Nyquist; row-major mel_bins x (window / 2 + 1).
std::vector<double> mel_filterbank(const FrontendConfig& cfg);
// Centre frequency (Hz) of each mel filter.
std::vector<double> mel_center_frequencies(const FrontendConfig& cfg);

// Number of centre-padded frames for a signal of `samples` samples.
std::size_t frame_count(std::size_t samples, std::size_t hop);

LogMelSpectrogram compute_log_mel(const Waveform& wave, const FrontendConfig& cfg);

// Truncates to floor(frames / t) * t frames and splits along time.
PatchSequence patchify(const LogMelSpectrogram& spec, std::size_t frames_per_patch);
// Inverse of patchify on the truncated spectrogram.
LogMelSpectrogram concatenate_patches(const PatchSequence& patches, std::size_t hop = 0);

LogMelSpectrogram spec_augment(const LogMelSpectrogram& spec, const SpecAugmentPolicy& policy, std::uint64_t seed,
                               std::vector<MaskBand>* applied = nullptr);

}  // namespace act
