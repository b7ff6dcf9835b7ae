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

#include "act/model/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "act/error.hpp"

namespace act {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'A', 'C', 'T', 'C', 'K', 'P', 'T', '\0'};

json encoder_to_json(const EncoderConfig& c) {
  return {{"patch_dim", c.patch_dim}, {"dim", c.dim},           {"heads", c.heads},
          {"layers", c.layers},       {"ffn_dim", c.ffn_dim},   {"max_patches", c.max_patches},
          {"num_tags", c.num_tags},   {"dropout", c.dropout},   {"ln_eps", c.ln_eps}};
}

json decoder_to_json(const DecoderConfig& c) {
  return {{"dim", c.dim},         {"heads", c.heads},           {"layers", c.layers}, {"ffn_dim", c.ffn_dim},
          {"vocab_size", c.vocab_size}, {"dropout", c.dropout}, {"ln_eps", c.ln_eps}};
}

EncoderConfig encoder_from_json(const json& j) {
  EncoderConfig c;
  c.patch_dim = j.at("patch_dim");
  c.dim = j.at("dim");
  c.heads = j.at("heads");
  c.layers = j.at("layers");
  c.ffn_dim = j.at("ffn_dim");
  c.max_patches = j.at("max_patches");
  c.num_tags = j.at("num_tags");
  c.dropout = j.at("dropout");
  c.ln_eps = j.at("ln_eps");
  return c;
}

DecoderConfig decoder_from_json(const json& j) {
  DecoderConfig c;
  c.dim = j.at("dim");
  c.heads = j.at("heads");
  c.layers = j.at("layers");
  c.ffn_dim = j.at("ffn_dim");
  c.vocab_size = j.at("vocab_size");
  c.dropout = j.at("dropout");
  c.ln_eps = j.at("ln_eps");
  return c;
}

struct Blob {
  json entries = json::array();
  std::vector<double> values;

  void add(const std::string& name, const Shape& shape, std::span<const double> data) {
    entries.push_back({{"name", name}, {"shape", shape}, {"dtype", "f64"}, {"offset", values.size() * 8}});
    values.insert(values.end(), data.begin(), data.end());
  }
};

Tensor read_entry(const json& entry, const std::vector<double>& blob) {
  if (entry.at("dtype") != "f64") throw ValidationError("unsupported tensor dtype in checkpoint");
  const Shape shape = entry.at("shape").get<Shape>();
  const std::size_t offset = entry.at("offset").get<std::size_t>();
  const std::size_t n = shape_numel(shape);
  if (offset % 8 != 0 || offset / 8 + n > blob.size()) {
    throw ValidationError("tensor " + entry.at("name").get<std::string>() + " lies outside the checkpoint blob");
  }
  std::vector<double> values(blob.begin() + static_cast<std::ptrdiff_t>(offset / 8),
                             blob.begin() + static_cast<std::ptrdiff_t>(offset / 8 + n));
  return Tensor(shape, std::move(values));
}

}  // namespace

const Tensor* CheckpointData::find(const std::string& name) const {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return &t.tensor;
  }
  return nullptr;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const CheckpointMeta& meta,
                     const AdamState* adam) {
  Blob blob;
  for (const NamedTensor& p : params.store()) blob.add(p.name, p.tensor.shape(), p.tensor.data());
  json header = {
      {"format", "act-checkpoint"},
      {"format_version", kCheckpointVersion},
      {"kind", meta.kind},
      {"epoch", meta.epoch},
      {"model",
       {{"encoder", encoder_to_json(params.config().encoder)},
        {"decoder", decoder_to_json(params.config().decoder)},
        {"init_std", params.config().init_std}}},
      {"run_config", meta.run_config},
      {"vocabulary", meta.vocabulary},
      {"tag_classes", meta.tag_classes},
  };
  header["tensors"] = blob.entries;
  if (adam != nullptr) {
    json m_entries = json::array();
    json v_entries = json::array();
    for (const NamedTensor& p : params.store()) {
      auto mi = adam->m.find(p.name);
      auto vi = adam->v.find(p.name);
      if (mi == adam->m.end() || vi == adam->v.end()) continue;
      const std::size_t before = blob.entries.size();
      blob.add(p.name, p.tensor.shape(), mi->second);
      m_entries.push_back(blob.entries[before]);
      blob.add(p.name, p.tensor.shape(), vi->second);
      v_entries.push_back(blob.entries[before + 1]);
    }
    header["adam"] = {{"step", adam->step},       {"beta1", adam->beta1}, {"beta2", adam->beta2},
                      {"epsilon", adam->epsilon}, {"m", m_entries},       {"v", v_entries}};
  }

  const std::string text = header.dump();
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    const std::uint64_t len = text.size();
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.write(reinterpret_cast<const char*>(blob.values.data()),
              static_cast<std::streamsize>(blob.values.size() * sizeof(double)));
    if (!out) throw IoError("failed writing checkpoint " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

CheckpointData load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  std::uint64_t len = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || magic != kMagic) throw ValidationError(path.string() + " is not a checkpoint file");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw ValidationError("truncated checkpoint header in " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() % 8 != 0) throw ValidationError("checkpoint blob length is not a multiple of 8");
  std::vector<double> blob(raw.size() / 8);
  std::memcpy(blob.data(), raw.data(), raw.size());

  CheckpointData data;
  try {
    const json header = json::parse(text);
    if (header.at("format") != "act-checkpoint") throw ValidationError("unknown checkpoint format");
    const int version = header.at("format_version");
    if (version > kCheckpointVersion) {
      throw ValidationError("checkpoint format version " + std::to_string(version) +
                            " is newer than supported version " + std::to_string(kCheckpointVersion));
    }
    data.meta.kind = header.at("kind");
    data.meta.epoch = header.at("epoch");
    data.meta.run_config = header.at("run_config");
    data.meta.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
    data.meta.tag_classes = header.at("tag_classes").get<std::vector<std::string>>();
    const json& model = header.at("model");
    data.model.encoder = encoder_from_json(model.at("encoder"));
    data.model.decoder = decoder_from_json(model.at("decoder"));
    data.model.init_std = model.at("init_std");
    for (const json& e : header.at("tensors")) {
      data.tensors.push_back({e.at("name"), read_entry(e, blob)});
    }
    if (header.contains("adam")) {
      const json& a = header.at("adam");
      AdamState st;
      st.step = a.at("step");
      st.beta1 = a.at("beta1");
      st.beta2 = a.at("beta2");
      st.epsilon = a.at("epsilon");
      for (const json& e : a.at("m")) {
        Tensor t = read_entry(e, blob);
        st.m[e.at("name")] = std::vector<double>(t.data().begin(), t.data().end());
      }
      for (const json& e : a.at("v")) {
        Tensor t = read_entry(e, blob);
        st.v[e.at("name")] = std::vector<double>(t.data().begin(), t.data().end());
      }
      data.adam = std::move(st);
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed checkpoint header in " + path.string() + ": " + e.what());
  }
  return data;
}

ModelParams restore_params(const CheckpointData& data) {
  ModelParams params = ModelParams::create(data.model, 0);
  for (const NamedTensor& p : params.store()) {
    if (data.find(p.name) == nullptr) throw ValidationError("checkpoint is missing tensor " + p.name);
  }
  if (data.tensors.size() != params.store().size()) {
    throw ValidationError("checkpoint holds " + std::to_string(data.tensors.size()) + " tensors, config expects " +
                          std::to_string(params.store().size()));
  }
  std::vector<std::string> all = {""};
  copy_matching_tensors(data, params, all);
  return params;
}

std::size_t copy_matching_tensors(const CheckpointData& source, const ModelParams& target,
                                  const std::vector<std::string>& prefixes) {
  std::size_t copied = 0;
  for (const NamedTensor& src : source.tensors) {
    bool wanted = false;
    for (const std::string& p : prefixes) wanted = wanted || src.name.starts_with(p);
    if (!wanted) continue;
    const Tensor* dst = target.store().find(src.name);
    if (dst == nullptr) throw ValidationError("tensor " + src.name + " has no counterpart in the model");
    if (dst->shape() != src.tensor.shape()) {
      throw ValidationError("tensor " + src.name + " has shape " + shape_to_string(src.tensor.shape()) +
                            " but the model expects " + shape_to_string(dst->shape()));
    }
    Tensor handle = *dst;
    auto out = handle.mutable_data();
    std::copy(src.tensor.data().begin(), src.tensor.data().end(), out.begin());
    ++copied;
  }
  return copied;
}

}  // namespace act
