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

#include "act/model/params.hpp"

#include <string>

#include "act/error.hpp"
#include "act/numerics/random.hpp"

namespace act {

void EncoderConfig::validate() const {
  if (patch_dim == 0 || dim == 0 || heads == 0 || layers == 0 || ffn_dim == 0 || max_patches == 0 ||
      num_tags == 0) {
    throw InvalidArgument("encoder dimensions must be positive");
  }
  if (dim % heads != 0) {
    throw InvalidArgument("encoder width " + std::to_string(dim) + " not divisible by " + std::to_string(heads) +
                          " heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidArgument("encoder dropout must be in [0, 1)");
  if (!(ln_eps > 0.0)) throw InvalidArgument("layer norm epsilon must be positive");
}

void DecoderConfig::validate() const {
  if (!enabled()) return;
  if (dim == 0 || heads == 0 || layers == 0 || ffn_dim == 0) throw InvalidArgument("decoder dimensions must be positive");
  if (dim % heads != 0) {
    throw InvalidArgument("decoder width " + std::to_string(dim) + " not divisible by " + std::to_string(heads) +
                          " heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidArgument("decoder dropout must be in [0, 1)");
  if (!(ln_eps > 0.0)) throw InvalidArgument("layer norm epsilon must be positive");
}

namespace {

class Initializer {
 public:
  Initializer(ParameterStore& store, std::uint64_t seed, double stddev) : store_(store), rng_(seed), std_(stddev) {}

  Tensor normal(const std::string& name, Shape shape) {
    std::vector<double> v(shape_numel(shape));
    for (double& x : v) x = rng_.normal(0.0, std_);
    return store_.add(name, Tensor(std::move(shape), std::move(v)));
  }
  Tensor constant(const std::string& name, Shape shape, double value) {
    return store_.add(name, Tensor::full(std::move(shape), value));
  }
  NormParams norm(const std::string& prefix, std::size_t d) {
    return {constant(prefix + ".gamma", {d}, 1.0), constant(prefix + ".beta", {d}, 0.0)};
  }
  AttentionParams attention(const std::string& prefix, std::size_t d_in, std::size_t d_kv, std::size_t d) {
    AttentionParams a;
    a.wq = normal(prefix + ".wq", {d_in, d});
    a.wk = normal(prefix + ".wk", {d_kv, d});
    a.wv = normal(prefix + ".wv", {d_kv, d});
    a.wo = normal(prefix + ".wo", {d, d});
    a.bo = constant(prefix + ".bo", {d}, 0.0);
    return a;
  }
  FeedForwardParams ffn(const std::string& prefix, std::size_t d, std::size_t hidden) {
    return {normal(prefix + ".w1", {d, hidden}), constant(prefix + ".b1", {hidden}, 0.0),
            normal(prefix + ".w2", {hidden, d}), constant(prefix + ".b2", {d}, 0.0)};
  }

 private:
  ParameterStore& store_;
  Rng rng_;
  double std_;
};

}  // namespace

ModelParams ModelParams::create(const ModelConfig& config, std::uint64_t seed) {
  config.encoder.validate();
  config.decoder.validate();
  if (!(config.init_std > 0.0)) throw InvalidArgument("init_std must be positive");

  ModelParams p;
  p.config_ = config;
  Initializer init(p.store_, seed, config.init_std);
  const EncoderConfig& enc = config.encoder;
  const std::size_t d = enc.dim;

  p.patch_embed = init.normal("encoder.patch_embed", {enc.patch_dim, d});
  p.cls = init.normal("encoder.cls", {1, d});
  p.pos = init.normal("encoder.pos", {enc.max_patches + 1, d});
  for (std::size_t i = 0; i < enc.layers; ++i) {
    const std::string prefix = "encoder.layers." + std::to_string(i);
    EncoderLayerParams layer;
    layer.ln1 = init.norm(prefix + ".ln1", d);
    layer.attn = init.attention(prefix + ".attn", d, d, d);
    layer.ln2 = init.norm(prefix + ".ln2", d);
    layer.ffn = init.ffn(prefix + ".ffn", d, enc.ffn_dim);
    p.encoder_layers.push_back(std::move(layer));
  }
  p.encoder_norm = init.norm("encoder.ln_final", d);
  p.tag_weight = init.normal("tagging.weight", {d, enc.num_tags});
  p.tag_bias = init.constant("tagging.bias", {enc.num_tags}, 0.0);

  const DecoderConfig& dec = config.decoder;
  if (dec.enabled()) {
    const std::size_t dd = dec.dim;
    if (dd != d) {
      p.bridge_weight = init.normal("bridge.weight", {d, dd});
      p.bridge_bias = init.constant("bridge.bias", {dd}, 0.0);
    }
    p.word_embed = init.normal("decoder.embed", {dec.vocab_size, dd});
    for (std::size_t i = 0; i < dec.layers; ++i) {
      const std::string prefix = "decoder.layers." + std::to_string(i);
      DecoderLayerParams layer;
      layer.ln1 = init.norm(prefix + ".ln1", dd);
      layer.self_attn = init.attention(prefix + ".self_attn", dd, dd, dd);
      layer.ln2 = init.norm(prefix + ".ln2", dd);
      layer.cross_attn = init.attention(prefix + ".cross_attn", dd, dd, dd);
      layer.ln3 = init.norm(prefix + ".ln3", dd);
      layer.ffn = init.ffn(prefix + ".ffn", dd, dec.ffn_dim);
      p.decoder_layers.push_back(std::move(layer));
    }
    p.decoder_norm = init.norm("decoder.ln_final", dd);
    p.out_weight = init.normal("decoder.out.weight", {dd, dec.vocab_size});
    p.out_bias = init.constant("decoder.out.bias", {dec.vocab_size}, 0.0);
  }
  return p;
}

std::size_t encoder_parameter_count(const EncoderConfig& cfg) {
  const std::size_t d = cfg.dim, f = cfg.ffn_dim;
  const std::size_t per_layer = (4 * d * d + d) + (2 * d * f + f + d) + 4 * d;
  return cfg.patch_dim * d + d + (cfg.max_patches + 1) * d + cfg.layers * per_layer + 2 * d +
         d * cfg.num_tags + cfg.num_tags;
}

std::size_t decoder_parameter_count(const DecoderConfig& cfg) {
  const std::size_t d = cfg.dim, f = cfg.ffn_dim, v = cfg.vocab_size;
  const std::size_t per_layer = 2 * (4 * d * d + d) + (2 * d * f + f + d) + 6 * d;
  return v * d + cfg.layers * per_layer + 2 * d + d * v + v;
}

}  // namespace act
