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

#include "act/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "act/error.hpp"

namespace act {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
void parse_value(T& out, const std::string& v, const std::string& key) {
  const auto fail = [&] { throw ValidationError("config key " + key + ": cannot parse '" + v + "'"); };
  if constexpr (std::is_same_v<T, bool>) {
    if (v == "true" || v == "1") {
      out = true;
    } else if (v == "false" || v == "0") {
      out = false;
    } else {
      fail();
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = v;
  } else if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) fail();
    out = d;
  } else {
    T parsed{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail();
    out = parsed;
  }
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_floating_point_v<T>) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    return std::string(buf, r.ptr);
  } else {
    return std::to_string(v);
  }
}

struct Field {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Field field(std::string name, std::string description, Access access) {
  Field f;
  f.key = {name, std::move(description)};
  f.set = [access, name](RunConfig& c, const std::string& v) { parse_value(access(c), v, name); };
  f.get = [access](const RunConfig& c) { return format_value(access(const_cast<RunConfig&>(c))); };
  return f;
}

#define ACT_FIELD(name, desc, expr) field(name, desc, [](RunConfig& c) -> auto& { return c.expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      ACT_FIELD("seed", "base seed for initialisation, shuffling and dropout (1)", seed),
      ACT_FIELD("out_dir", "output directory (out)", out_dir),
      ACT_FIELD("frontend.sample_rate", "target sample rate in Hz (32000)", frontend.sample_rate),
      ACT_FIELD("frontend.clip_seconds", "clip length after pad or truncate (10)", frontend.clip_seconds),
      ACT_FIELD("frontend.window", "Hann window and FFT length (1024)", frontend.window),
      ACT_FIELD("frontend.hop", "frame hop in samples (512)", frontend.hop),
      ACT_FIELD("frontend.mel_bins", "mel bins (64)", frontend.mel_bins),
      ACT_FIELD("frontend.log_floor", "energy floor before the log (1e-10)", frontend.log_floor),
      ACT_FIELD("frontend.patch_frames", "frames per patch (4)", frontend.patch_frames),
      ACT_FIELD("augment.time_mask_width_max", "SpecAugment time mask width limit in frames (40)",
                train.augment.time_mask_width_max),
      ACT_FIELD("augment.freq_mask_width_max", "SpecAugment frequency mask width limit in bins (8)",
                train.augment.freq_mask_width_max),
      ACT_FIELD("augment.num_time_masks", "time masks per example (2)", train.augment.num_time_masks),
      ACT_FIELD("augment.num_freq_masks", "frequency masks per example (2)", train.augment.num_freq_masks),
      ACT_FIELD("augment.mask_value", "value written into masked cells (0)", train.augment.mask_value),
      ACT_FIELD("encoder.dim", "encoder width (128)", model.encoder.dim),
      ACT_FIELD("encoder.heads", "encoder attention heads (4)", model.encoder.heads),
      ACT_FIELD("encoder.layers", "encoder blocks (2)", model.encoder.layers),
      ACT_FIELD("encoder.ffn_dim", "encoder feed-forward width (512)", model.encoder.ffn_dim),
      ACT_FIELD("encoder.max_patches", "longest patch sequence (160)", model.encoder.max_patches),
      ACT_FIELD("encoder.dropout", "encoder dropout rate (0.2)", model.encoder.dropout),
      ACT_FIELD("decoder.dim", "decoder width (128)", model.decoder.dim),
      ACT_FIELD("decoder.heads", "decoder attention heads (4)", model.decoder.heads),
      ACT_FIELD("decoder.layers", "decoder blocks (2)", model.decoder.layers),
      ACT_FIELD("decoder.ffn_dim", "decoder feed-forward width (512)", model.decoder.ffn_dim),
      ACT_FIELD("decoder.dropout", "decoder dropout rate (0.2)", model.decoder.dropout),
      ACT_FIELD("model.init_std", "standard deviation of the normal weight init (0.02)", model.init_std),
      ACT_FIELD("train.epochs", "caption training epochs (30)", train.epochs),
      ACT_FIELD("train.batch_size", "captions per optimizer step (32)", train.batch_size),
      ACT_FIELD("train.base_lr", "peak learning rate (1e-4)", train.base_lr),
      ACT_FIELD("train.warmup_epochs", "linear warmup epochs (5)", train.warmup_epochs),
      ACT_FIELD("train.decay_every", "epochs per decay step (10)", train.decay_every),
      ACT_FIELD("train.decay_factor", "multiplier per decay step (0.1)", train.decay_factor),
      ACT_FIELD("train.label_smoothing", "label smoothing (0.1)", train.label_smoothing),
      ACT_FIELD("train.freeze_encoder", "keep encoder weights fixed while captioning (false)", train.freeze_encoder),
      ACT_FIELD("train.checkpoint_every", "epochs between periodic checkpoints (10)", checkpoint_every),
      ACT_FIELD("train.stop_loss", "stop once epoch loss falls below this; 0 disables (0)", stop_loss),
      ACT_FIELD("pretrain.epochs", "tagging pretraining epochs (20)", pretrain.epochs),
      ACT_FIELD("pretrain.batch_size", "clips per tagging step (128)", pretrain.batch_size),
      ACT_FIELD("pretrain.base_lr", "tagging peak learning rate (1e-4)", pretrain.base_lr),
      ACT_FIELD("pretrain.warmup_epochs", "tagging warmup epochs (5)", pretrain.warmup_epochs),
      ACT_FIELD("pretrain.decay_every", "tagging epochs per decay step (10)", pretrain.decay_every),
      ACT_FIELD("pretrain.decay_factor", "tagging multiplier per decay step (0.1)", pretrain.decay_factor),
      ACT_FIELD("text.min_count", "minimum word count for the vocabulary (1)", text.min_count),
      ACT_FIELD("text.word2vec", "initialise word embeddings with skip-gram (true)", text.word2vec),
      ACT_FIELD("text.word2vec_epochs", "skip-gram epochs (5)", text.word2vec_epochs),
      ACT_FIELD("text.word2vec_window", "skip-gram context window (2)", text.word2vec_window),
      ACT_FIELD("text.word2vec_negatives", "negative samples per pair (5)", text.word2vec_negatives),
      ACT_FIELD("decode.beam_size", "beam width, 1 is greedy (5)", decode.beam_size),
      ACT_FIELD("decode.max_len", "generated token limit (22)", decode.max_len),
      ACT_FIELD("decode.length_norm", "rank beams by mean token log-probability (false)", decode.length_norm),
  };
  return table;
}

#undef ACT_FIELD

}  // namespace

RunConfig::RunConfig() {
  train.augment.time_mask_width_max = 40;
  train.augment.freq_mask_width_max = 8;
  train.augment.num_time_masks = 2;
  train.augment.num_freq_masks = 2;
  pretrain.epochs = 20;
  pretrain.batch_size = 128;
}

ModelConfig RunConfig::model_config(std::size_t vocab_size, std::size_t num_tags) const {
  ModelConfig m = model;
  m.encoder.patch_dim = frontend.patch_frames * frontend.mel_bins;
  m.encoder.num_tags = num_tags;
  m.decoder.vocab_size = vocab_size;
  return m;
}

TrainConfig RunConfig::caption_train_config() const {
  TrainConfig t = train;
  t.seed = derive_seed(seed, 101);
  t.patch_frames = frontend.patch_frames;
  return t;
}

TrainConfig RunConfig::pretrain_config() const {
  TrainConfig t = pretrain;
  t.seed = derive_seed(seed, 102);
  t.patch_frames = frontend.patch_frames;
  t.augment = train.augment;
  return t;
}

void RunConfig::validate() const {
  if (frontend.sample_rate <= 0 || !(frontend.clip_seconds > 0.0)) {
    throw ValidationError("frontend sample rate and clip length must be positive");
  }
  if (frontend.window == 0 || frontend.hop == 0 || frontend.mel_bins == 0 || frontend.patch_frames == 0) {
    throw ValidationError("frontend sizes must be positive");
  }
  if (checkpoint_every == 0) throw ValidationError("train.checkpoint_every must be at least 1");
  if (decode.beam_size == 0 || decode.max_len == 0) throw ValidationError("decode sizes must be positive");
  try {
    model_config(8, 1).encoder.validate();
    model_config(8, 1).decoder.validate();
    caption_train_config().validate();
    pretrain_config().validate();
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("invalid configuration: ") + e.what());
  }
}

const std::vector<ConfigKey>& run_config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Field& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

RunConfig parse_run_config(const std::string& text) {
  std::map<std::string, const Field*> index;
  for (const Field& f : fields()) index[f.key.name] = &f;
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) throw ValidationError("config line " + std::to_string(line_no) + ": unknown key " + key);
    it->second->set(config, value);
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_text(const RunConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key.name + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace act
