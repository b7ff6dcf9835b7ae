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

// Dataset manifests: JSON lines. The first line is a header
//   {"format":"act-manifest","version":1,"kind":"caption"|"tagging"}
// and every further line is one clip record with an "id", an audio source
// ("wav" path relative to the manifest, or "events" plus "seed" for a
// synthesized clip), "captions" and optionally "tags".

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "act/audio/frontend.hpp"
#include "act/audio/synth.hpp"

namespace act {

inline constexpr int kManifestVersion = 1;

struct ManifestRecord {
  std::string id;
  std::string wav;  // empty for synthesized sources
  std::vector<SoundEvent> events;
  std::uint64_t seed = 0;
  std::vector<std::string> captions;
  std::vector<std::string> tags;
  bool has_tags = false;
};

struct Manifest {
  std::string kind = "caption";
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;  // directory wav paths are relative to
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Decodes or synthesizes the clip audio.
Waveform load_record_audio(const ManifestRecord& record, const std::filesystem::path& base_dir, int sample_rate,
                           double clip_seconds);

}  // namespace act
