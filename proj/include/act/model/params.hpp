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
#include <vector>

#include "act/numerics/optim.hpp"
#include "act/numerics/tensor.hpp"

namespace act {

struct EncoderConfig {
  std::size_t patch_dim = 256;  // frames per patch x mel bins
  std::size_t dim = 128;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 512;
  std::size_t max_patches = 160;
  std::size_t num_tags = 3;
  double dropout = 0.2;
  double ln_eps = 1e-5;

  std::size_t head_dim() const { return dim / heads; }
  void validate() const;
};

// vocab_size == 0 builds an encoder-only model (tagging pretraining).
struct DecoderConfig {
  std::size_t dim = 128;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn_dim = 512;
  std::size_t vocab_size = 0;
  double dropout = 0.2;
  double ln_eps = 1e-5;

  bool enabled() const { return vocab_size > 0; }
  void validate() const;
};

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  double init_std = 0.02;
};

struct NormParams {
  Tensor gamma;
  Tensor beta;
};

// Per-head projections live side by side in the columns of wq / wk / wv
// (d_in x heads*d_k); wo maps the concatenated heads back to d. The input
// projections carry no bias: a key bias cannot change the softmax and the
// attention formula has none.
struct AttentionParams {
  Tensor wq, wk, wv, wo, bo;
};

struct FeedForwardParams {
  Tensor w1, b1, w2, b2;
};

struct EncoderLayerParams {
  NormParams ln1;
  AttentionParams attn;
  NormParams ln2;
  FeedForwardParams ffn;
};

struct DecoderLayerParams {
  NormParams ln1;
  AttentionParams self_attn;
  NormParams ln2;
  AttentionParams cross_attn;
  NormParams ln3;
  FeedForwardParams ffn;
};

// All learnable weights. Typed members alias the entries of `store`, which
// owns names and ordering for checkpoints and the optimizer.
class ModelParams {
 public:
  static ModelParams create(const ModelConfig& config, std::uint64_t seed);

  ModelParams(ModelParams&&) = default;
  ModelParams& operator=(ModelParams&&) = default;
  ModelParams(const ModelParams&) = delete;
  ModelParams& operator=(const ModelParams&) = delete;

  const ModelConfig& config() const { return config_; }
  const ParameterStore& store() const { return store_; }
  bool has_bridge() const { return bridge_weight.defined(); }

  // Encoder
  Tensor patch_embed;  // patch_dim x d
  Tensor cls;          // 1 x d
  Tensor pos;          // (max_patches + 1) x d
  std::vector<EncoderLayerParams> encoder_layers;
  NormParams encoder_norm;
  // Tagging head on the class token
  Tensor tag_weight, tag_bias;
  // Memory projection when encoder and decoder widths differ
  Tensor bridge_weight, bridge_bias;
  // Decoder
  Tensor word_embed;  // vocab x d_dec
  std::vector<DecoderLayerParams> decoder_layers;
  NormParams decoder_norm;
  Tensor out_weight, out_bias;

 private:
  ModelParams() = default;

  ModelConfig config_;
  ParameterStore store_;
};

// Closed-form trainable parameter count of the decoder stack including word
// embeddings, final norm and vocabulary projection.
std::size_t decoder_parameter_count(const DecoderConfig& cfg);
std::size_t encoder_parameter_count(const EncoderConfig& cfg);

}  // namespace act
