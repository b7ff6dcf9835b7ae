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

#include "act/audio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "act/error.hpp"

namespace act {

namespace {

constexpr std::array<EventKindInfo, 3> kRegistry = {{
    {EventKind::kTone, "tone", 0, "a tone sounds", "a tone"},
    {EventKind::kNoiseBurst, "noise", 1, "a burst of noise", "a burst of noise"},
    {EventKind::kChirp, "chirp", 2, "a chirp rises", "a rising chirp"},
}};

constexpr double kAmplitude = 0.5;
constexpr double kFadeSeconds = 0.01;

std::vector<SoundEvent> onset_order(std::span<const SoundEvent> events) {
  std::vector<SoundEvent> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SoundEvent& a, const SoundEvent& b) { return a.onset_s < b.onset_s; });
  return sorted;
}

}  // namespace

const std::array<EventKindInfo, 3>& event_registry() { return kRegistry; }

const EventKindInfo& event_info(EventKind kind) {
  for (const auto& info : kRegistry) {
    if (info.kind == kind) return info;
  }
  throw InvalidArgument("unregistered event kind");
}

std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (const auto& info : kRegistry) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

std::string caption_for_events(std::span<const SoundEvent> events) {
  std::string caption;
  const auto ordered = onset_order(events);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const EventKindInfo& info = event_info(ordered[i].kind);
    if (i == 0) {
      caption += info.lead_phrase;
    } else {
      caption += i == 1 ? " followed by " : " then ";
      caption += info.follow_phrase;
    }
  }
  return caption;
}

SynthClip synthesize_event_clip(std::span<const SoundEvent> events, std::uint64_t seed, int sample_rate,
                                double clip_seconds) {
  if (sample_rate <= 0 || !(clip_seconds > 0.0)) throw InvalidArgument("invalid clip geometry");
  if (events.empty()) throw InvalidArgument("synthesize_event_clip: no events");
  for (const auto& e : events) {
    if (e.onset_s < 0.0 || !(e.duration_s > 0.0) || e.onset_s + e.duration_s > clip_seconds + 1e-9) {
      throw InvalidArgument("event [" + std::to_string(e.onset_s) + " s, +" + std::to_string(e.duration_s) +
                            " s] does not fit in a " + std::to_string(clip_seconds) + " s clip");
    }
    if (e.kind != EventKind::kNoiseBurst && !(e.frequency_hz > 0.0 && e.frequency_hz < sample_rate / 2.0)) {
      throw InvalidArgument("event frequency must lie between 0 Hz and Nyquist");
    }
  }

  const auto total = static_cast<std::size_t>(std::llround(clip_seconds * sample_rate));
  SynthClip clip;
  clip.waveform.sample_rate = sample_rate;
  clip.waveform.samples.assign(total, 0.0);
  Rng rng(seed);
  const double fs = static_cast<double>(sample_rate);

  for (const auto& e : events) {
    const auto begin = static_cast<std::size_t>(std::llround(e.onset_s * fs));
    const auto end = std::min(total, static_cast<std::size_t>(std::llround((e.onset_s + e.duration_s) * fs)));
    const double fade = kFadeSeconds * fs;
    double phase = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double local = static_cast<double>(i - begin);
      const double remaining = static_cast<double>(end - 1 - i);
      const double envelope = kAmplitude * std::min({1.0, local / fade, remaining / fade});
      double s = 0.0;
      switch (e.kind) {
        case EventKind::kTone:
          s = std::sin(2.0 * std::numbers::pi * e.frequency_hz * local / fs);
          break;
        case EventKind::kNoiseBurst:
          s = rng.uniform(-1.0, 1.0);
          break;
        case EventKind::kChirp: {
          const double progress = local / std::max(1.0, static_cast<double>(end - begin));
          const double freq = e.frequency_hz + (e.end_frequency_hz - e.frequency_hz) * progress;
          phase += 2.0 * std::numbers::pi * freq / fs;
          s = std::sin(phase);
          break;
        }
      }
      clip.waveform.samples[i] += envelope * s;
    }
  }
  for (double& s : clip.waveform.samples) s = std::clamp(s, -1.0, 1.0);

  clip.caption = caption_for_events(events);
  for (const auto& info : kRegistry) {
    const bool present =
        std::any_of(events.begin(), events.end(), [&](const SoundEvent& e) { return e.kind == info.kind; });
    if (present) clip.tags.emplace_back(info.name);
  }
  return clip;
}

std::vector<SoundEvent> random_event_list(Rng& rng, std::size_t max_events, double clip_seconds) {
  if (max_events == 0) throw InvalidArgument("random_event_list: max_events must be positive");
  const auto count = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_events)));
  // Split the clip into equal slots and place one event inside each.
  const double slot = clip_seconds / static_cast<double>(count);
  std::vector<SoundEvent> events;
  for (std::size_t i = 0; i < count; ++i) {
    SoundEvent e;
    e.kind = kRegistry[rng.below(kRegistry.size())].kind;
    e.duration_s = rng.uniform(0.5, 0.8) * slot;
    e.onset_s = static_cast<double>(i) * slot + rng.uniform(0.0, slot - e.duration_s);
    if (e.kind == EventKind::kTone) {
      e.frequency_hz = rng.uniform(300.0, 3000.0);
    } else if (e.kind == EventKind::kChirp) {
      e.frequency_hz = rng.uniform(300.0, 800.0);
      e.end_frequency_hz = rng.uniform(3000.0, 6000.0);
    }
    events.push_back(e);
  }
  return events;
}

}  // namespace act
