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

#include "act/audio/frontend.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "act/error.hpp"
#include "act/numerics/random.hpp"

namespace act {

namespace {

// FFTW's planner is not thread-safe; execution on a private plan is.
std::mutex g_fftw_planner_mutex;

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  // Magnitude of bins 0..n/2 after transforming input().
  void magnitudes(std::vector<double>& mag) {
    fftw_execute(plan_);
    mag.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out_[k][0], out_[k][1]);
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

void validate(const FrontendConfig& cfg) {
  if (cfg.sample_rate <= 0) throw InvalidArgument("sample_rate must be positive");
  if (cfg.window < 2 || cfg.hop == 0 || cfg.mel_bins == 0) throw InvalidArgument("invalid STFT/mel configuration");
  if (!(cfg.log_floor > 0.0)) throw InvalidArgument("log floor must be positive");
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Waveform resample_linear(const Waveform& in, int target_rate) {
  if (in.sample_rate <= 0 || target_rate <= 0) throw InvalidArgument("sample rates must be positive");
  if (in.sample_rate == target_rate || in.samples.empty()) return Waveform{in.samples, target_rate};
  const double ratio = static_cast<double>(in.sample_rate) / target_rate;
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(in.samples.size()) * target_rate / in.sample_rate));
  Waveform out{std::vector<double>(out_len), target_rate};
  const std::size_t last = in.samples.size() - 1;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto k = std::min(static_cast<std::size_t>(pos), last);
    const double frac = pos - static_cast<double>(k);
    const double next = k < last ? in.samples[k + 1] : in.samples[k];
    out.samples[i] = in.samples[k] + frac * (next - in.samples[k]);
  }
  return out;
}

Waveform prepare_waveform(const Waveform& in, const FrontendConfig& cfg) {
  validate(cfg);
  Waveform out = resample_linear(in, cfg.sample_rate);
  const auto target = static_cast<std::size_t>(std::llround(cfg.clip_seconds * cfg.sample_rate));
  out.samples.resize(target, 0.0);
  return out;
}

std::vector<double> mel_center_frequencies(const FrontendConfig& cfg) {
  validate(cfg);
  const double top = hz_to_mel(cfg.sample_rate / 2.0);
  std::vector<double> centers(cfg.mel_bins);
  for (std::size_t m = 0; m < cfg.mel_bins; ++m) {
    centers[m] = mel_to_hz(top * static_cast<double>(m + 1) / static_cast<double>(cfg.mel_bins + 1));
  }
  return centers;
}

std::vector<double> mel_filterbank(const FrontendConfig& cfg) {
  validate(cfg);
  const std::size_t bins = cfg.window / 2 + 1;
  const double top = hz_to_mel(cfg.sample_rate / 2.0);
  std::vector<double> edges(cfg.mel_bins + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(cfg.mel_bins + 1));
  }
  std::vector<double> weights(cfg.mel_bins * bins, 0.0);
  for (std::size_t m = 0; m < cfg.mel_bins; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    const double area_norm = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(cfg.window);
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      weights[m * bins + k] = std::max(0.0, std::min(rise, fall)) * area_norm;
    }
  }
  return weights;
}

std::size_t frame_count(std::size_t samples, std::size_t hop) { return samples / hop + 1; }

LogMelSpectrogram compute_log_mel(const Waveform& wave, const FrontendConfig& cfg) {
  validate(cfg);
  if (wave.samples.empty()) throw InvalidArgument("compute_log_mel: empty waveform");
  if (wave.sample_rate != cfg.sample_rate) {
    throw InvalidArgument("compute_log_mel: expected " + std::to_string(cfg.sample_rate) + " Hz, got " +
                          std::to_string(wave.sample_rate) + " Hz");
  }
  const std::size_t n = cfg.window, half = n / 2, bins = n / 2 + 1;
  const std::size_t frames = frame_count(wave.samples.size(), cfg.hop);
  const std::vector<double> fbank = mel_filterbank(cfg);

  // Periodic Hann window.
  std::vector<double> window(n);
  for (std::size_t i = 0; i < n; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }

  LogMelSpectrogram spec;
  spec.frames = frames;
  spec.mel_bins = cfg.mel_bins;
  spec.hop = cfg.hop;
  spec.values.resize(frames * cfg.mel_bins);

  RealFft fft(n);
  std::vector<double> mag;
  const auto total = static_cast<std::ptrdiff_t>(wave.samples.size());
  for (std::size_t t = 0; t < frames; ++t) {
    // Frame t is centred on sample t * hop; samples outside the signal are zero.
    const auto start = static_cast<std::ptrdiff_t>(t * cfg.hop) - static_cast<std::ptrdiff_t>(half);
    double* buf = fft.input();
    for (std::size_t i = 0; i < n; ++i) {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(i);
      buf[i] = (idx >= 0 && idx < total) ? wave.samples[static_cast<std::size_t>(idx)] * window[i] : 0.0;
    }
    fft.magnitudes(mag);
    for (std::size_t m = 0; m < cfg.mel_bins; ++m) {
      const double* w = fbank.data() + m * bins;
      double energy = 0.0;
      for (std::size_t k = 0; k < bins; ++k) energy += w[k] * mag[k];
      spec.values[t * cfg.mel_bins + m] = std::log(std::max(cfg.log_floor, energy));
    }
  }
  return spec;
}

PatchSequence patchify(const LogMelSpectrogram& spec, std::size_t frames_per_patch) {
  if (frames_per_patch == 0) throw InvalidArgument("patchify: patch length must be at least one frame");
  if (frames_per_patch > spec.frames) {
    throw InvalidArgument("patchify: patch length " + std::to_string(frames_per_patch) + " exceeds " +
                          std::to_string(spec.frames) + " frames");
  }
  PatchSequence patches;
  patches.count = spec.frames / frames_per_patch;
  patches.frames_per_patch = frames_per_patch;
  patches.mel_bins = spec.mel_bins;
  // Row-major frames make each patch a contiguous run of the truncated matrix.
  const std::size_t used = patches.count * frames_per_patch * spec.mel_bins;
  patches.values.assign(spec.values.begin(), spec.values.begin() + static_cast<std::ptrdiff_t>(used));
  return patches;
}

LogMelSpectrogram concatenate_patches(const PatchSequence& patches, std::size_t hop) {
  LogMelSpectrogram spec;
  spec.frames = patches.count * patches.frames_per_patch;
  spec.mel_bins = patches.mel_bins;
  spec.hop = hop;
  spec.values = patches.values;
  return spec;
}

LogMelSpectrogram spec_augment(const LogMelSpectrogram& spec, const SpecAugmentPolicy& policy, std::uint64_t seed,
                               std::vector<MaskBand>* applied) {
  LogMelSpectrogram out = spec;
  Rng rng(seed);
  auto draw = [&rng](std::size_t width_max, std::size_t extent) {
    MaskBand band;
    band.width = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(std::min(width_max, extent))));
    band.start = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(extent - band.width)));
    return band;
  };
  for (std::size_t i = 0; i < policy.num_time_masks; ++i) {
    MaskBand band = draw(policy.time_mask_width_max, out.frames);
    band.axis = MaskBand::Axis::kTime;
    for (std::size_t t = band.start; t < band.start + band.width; ++t)
      for (std::size_t f = 0; f < out.mel_bins; ++f) out.at(t, f) = policy.mask_value;
    if (applied) applied->push_back(band);
  }
  for (std::size_t i = 0; i < policy.num_freq_masks; ++i) {
    MaskBand band = draw(policy.freq_mask_width_max, out.mel_bins);
    band.axis = MaskBand::Axis::kFrequency;
    for (std::size_t t = 0; t < out.frames; ++t)
      for (std::size_t f = band.start; f < band.start + band.width; ++f) out.at(t, f) = policy.mask_value;
    if (applied) applied->push_back(band);
  }
  return out;
}

}  // namespace act
