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

#include "act/cli/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "act/audio/wav.hpp"
#include "act/error.hpp"

namespace act {

namespace {

using nlohmann::ordered_json;

ordered_json event_to_json(const SoundEvent& e) {
  ordered_json j = {{"kind", std::string(event_info(e.kind).name)}, {"onset", e.onset_s}, {"duration", e.duration_s}};
  if (e.kind != EventKind::kNoiseBurst) j["frequency"] = e.frequency_hz;
  if (e.kind == EventKind::kChirp) j["end_frequency"] = e.end_frequency_hz;
  return j;
}

SoundEvent event_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind");
  const auto parsed = event_kind_from_name(kind);
  if (!parsed) throw ValidationError("unknown event kind " + kind);
  SoundEvent e;
  e.kind = *parsed;
  e.onset_s = j.at("onset");
  e.duration_s = j.at("duration");
  if (j.contains("frequency")) e.frequency_hz = j.at("frequency");
  if (j.contains("end_frequency")) e.end_frequency_hz = j.at("end_frequency");
  return e;
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const ordered_json j = ordered_json::parse(line);
      if (line_no == 1) {
        if (!j.contains("format") || j.at("format") != "act-manifest") {
          throw ValidationError(path.string() + " does not start with a manifest header");
        }
        const int version = j.at("version");
        if (version > kManifestVersion) {
          throw ValidationError("manifest version " + std::to_string(version) + " is newer than supported version " +
                                std::to_string(kManifestVersion));
        }
        m.kind = j.at("kind");
        if (m.kind != "caption" && m.kind != "tagging") throw ValidationError("unknown manifest kind " + m.kind);
        continue;
      }
      ManifestRecord r;
      r.id = j.at("id");
      if (!seen.insert(r.id).second) throw ValidationError("duplicate clip id " + r.id);
      if (j.contains("wav")) r.wav = j.at("wav");
      if (j.contains("events")) {
        for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
        r.seed = j.value("seed", std::uint64_t{0});
      }
      if (r.wav.empty() && r.events.empty()) throw ValidationError("clip " + r.id + " has no audio source");
      if (j.contains("captions")) r.captions = j.at("captions").get<std::vector<std::string>>();
      if (j.contains("tags")) {
        r.tags = j.at("tags").get<std::vector<std::string>>();
        r.has_tags = true;
      }
      if (m.kind == "caption" && (r.captions.empty() || r.captions.size() > 5)) {
        throw ValidationError("clip " + r.id + " needs one to five captions");
      }
      if (m.kind == "tagging" && !r.has_tags) throw ValidationError("clip " + r.id + " has no tags");
      m.records.push_back(std::move(r));
    }
  } catch (const ordered_json::exception& e) {
    throw ValidationError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
  }
  if (line_no == 0) throw ValidationError(path.string() + " is empty");
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << ordered_json{{"format", "act-manifest"}, {"version", kManifestVersion}, {"kind", manifest.kind}}.dump()
      << '\n';
  for (const ManifestRecord& r : manifest.records) {
    ordered_json j = {{"id", r.id}};
    if (!r.wav.empty()) j["wav"] = r.wav;
    if (!r.events.empty()) {
      ordered_json events = ordered_json::array();
      for (const SoundEvent& e : r.events) events.push_back(event_to_json(e));
      j["events"] = events;
      j["seed"] = r.seed;
    }
    if (!r.captions.empty()) j["captions"] = r.captions;
    if (r.has_tags) j["tags"] = r.tags;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing manifest " + path.string());
}

Waveform load_record_audio(const ManifestRecord& record, const std::filesystem::path& base_dir, int sample_rate,
                           double clip_seconds) {
  if (!record.wav.empty()) {
    return read_wav(base_dir / record.wav);  // an absolute wav path replaces base_dir
  }
  return synthesize_event_clip(record.events, record.seed, sample_rate, clip_seconds).waveform;
}

}  // namespace act
