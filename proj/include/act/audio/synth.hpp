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

// Procedural sound-event clips with template captions and tag sets, used as
// a small stand-in corpus for captioning and tagging experiments.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "act/audio/frontend.hpp"
#include "act/numerics/random.hpp"

namespace act {

enum class EventKind { kTone, kNoiseBurst, kChirp };

struct SoundEvent {
  EventKind kind = EventKind::kTone;
  double onset_s = 0.0;
  double duration_s = 1.0;
  double frequency_hz = 440.0;  // tone pitch, or chirp start frequency
  double end_frequency_hz = 4000.0;  // chirp only
};

struct EventKindInfo {
  EventKind kind;
  std::string_view name;  // also the tag label
  int tag_id;
  std::string_view lead_phrase;    // phrase when the event opens the caption
  std::string_view follow_phrase;  // phrase after an ordering word
};

const std::array<EventKindInfo, 3>& event_registry();
const EventKindInfo& event_info(EventKind kind);
std::optional<EventKind> event_kind_from_name(std::string_view name);

struct SynthClip {
  Waveform waveform;
  std::string caption;
  std::vector<std::string> tags;  // registry order, no duplicates
};

// Caption from events in onset order: the first event's lead phrase, then
// "followed by" for the second and "then" for every later one.
std::string caption_for_events(std::span<const SoundEvent> events);

SynthClip synthesize_event_clip(std::span<const SoundEvent> events, std::uint64_t seed, int sample_rate = 32000,
                                double clip_seconds = 10.0);

// One to `max_events` sequential, non-overlapping events inside the clip.
std::vector<SoundEvent> random_event_list(Rng& rng, std::size_t max_events = 3, double clip_seconds = 10.0);

}  // namespace act
