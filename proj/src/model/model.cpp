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

#include "act/model/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "act/error.hpp"
#include "act/numerics/ops.hpp"

namespace act {

namespace {

Tensor maybe_dropout(const Tensor& x, double p, const ForwardOptions& opts) {
  if (!opts.train || p == 0.0) return x;
  if (opts.rng == nullptr) throw InvalidArgument("training forward pass needs an rng for dropout");
  return dropout(x, p, true, *opts.rng);
}

Tensor feed_forward(const Tensor& x, const FeedForwardParams& ffn) {
  return linear(gelu(linear(x, ffn.w1, ffn.b1)), ffn.w2, ffn.b2);
}

Tensor norm(const Tensor& x, const NormParams& p, double eps) { return layer_norm(x, p.gamma, p.beta, eps); }

}  // namespace

Tensor embed_patches(const Tensor& patches, const ModelParams& params, const ForwardOptions& opts) {
  const EncoderConfig& cfg = params.config().encoder;
  if (patches.rank() != 2 || patches.dim(1) != cfg.patch_dim) {
    throw InvalidArgument("patches must be N x " + std::to_string(cfg.patch_dim) + ", got " +
                          shape_to_string(patches.shape()));
  }
  const std::size_t n = patches.dim(0);
  if (n > cfg.max_patches) {
    throw InvalidArgument(std::to_string(n) + " patches exceed max_patches " + std::to_string(cfg.max_patches));
  }
  Tensor rows = concat_rows(params.cls, matmul(patches, params.patch_embed));
  Tensor x = add(rows, slice_rows(params.pos, 0, n + 1));
  return maybe_dropout(x, cfg.dropout, opts);
}

Tensor embed_patches(const PatchSequence& patches, const ModelParams& params, const ForwardOptions& opts) {
  if (patches.count == 0) throw InvalidArgument("patch sequence is empty");
  Tensor x({patches.count, patches.patch_dim()}, patches.values);
  return embed_patches(x, params, opts);
}

Tensor causal_mask(std::size_t rows) {
  if (rows == 0) throw InvalidArgument("causal mask needs at least one row");
  Tensor mask = Tensor::zeros({rows, rows});
  auto m = mask.mutable_data();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i + 1; j < rows; ++j) m[i * rows + j] = neg_inf;
  }
  return mask;
}

Tensor multi_head_attention(const Tensor& xq, const Tensor& xkv, const AttentionParams& attn, std::size_t heads,
                            const Tensor& mask, AttentionTrace* trace, const std::string& site, std::size_t layer) {
  if (xq.rank() != 2 || xkv.rank() != 2) throw InvalidArgument("attention inputs must be rank 2");
  const std::size_t d = attn.wq.dim(1);
  if (heads == 0 || d % heads != 0) throw InvalidArgument("attention width not divisible by head count");
  const std::size_t nq = xq.dim(0), nk = xkv.dim(0);
  if (mask.defined() && mask.shape() != Shape{nq, nk}) {
    throw InvalidArgument("attention mask shape " + shape_to_string(mask.shape()) + " does not match " +
                          shape_to_string({nq, nk}));
  }
  const std::size_t dk = d / heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = matmul(xq, attn.wq);
  Tensor k = matmul(xkv, attn.wk);
  Tensor v = matmul(xkv, attn.wv);

  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t lo = h * dk, hi = lo + dk;
    Tensor logits = scale(matmul_nt(slice_cols(q, lo, hi), slice_cols(k, lo, hi)), inv_sqrt_dk);
    if (mask.defined()) logits = add(logits, mask);
    Tensor weights = softmax(logits, 1);
    if (trace != nullptr) trace->push_back({site, layer, h, weights.detach()});
    outputs.push_back(matmul(weights, slice_cols(v, lo, hi)));
  }
  Tensor merged = heads == 1 ? outputs.front() : concat_cols(outputs);
  return linear(merged, attn.wo, attn.bo);
}

Tensor encoder_forward(const Tensor& embedded, const ModelParams& params, const ForwardOptions& opts) {
  const EncoderConfig& cfg = params.config().encoder;
  if (embedded.rank() != 2 || embedded.dim(1) != cfg.dim) {
    throw InvalidArgument("encoder input must be rows x " + std::to_string(cfg.dim));
  }
  Tensor x = embedded;
  for (std::size_t i = 0; i < params.encoder_layers.size(); ++i) {
    const EncoderLayerParams& layer = params.encoder_layers[i];
    Tensor h = norm(x, layer.ln1, cfg.ln_eps);
    h = multi_head_attention(h, h, layer.attn, cfg.heads, {}, opts.trace, "encoder.self", i);
    x = add(x, maybe_dropout(h, cfg.dropout, opts));
    h = feed_forward(norm(x, layer.ln2, cfg.ln_eps), layer.ffn);
    x = add(x, maybe_dropout(h, cfg.dropout, opts));
  }
  return norm(x, params.encoder_norm, cfg.ln_eps);
}

Tensor decoder_memory(const Tensor& encoded, const ModelParams& params) {
  if (!params.has_bridge()) return encoded;
  return linear(encoded, params.bridge_weight, params.bridge_bias);
}

Tensor sinusoidal_positions(std::size_t rows, std::size_t dim) {
  Tensor pe = Tensor::zeros({rows, dim});
  auto p = pe.mutable_data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double rate = std::pow(10000.0, -static_cast<double>(c - c % 2) / static_cast<double>(dim));
      const double angle = static_cast<double>(r) * rate;
      p[r * dim + c] = c % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Tensor decoder_forward(std::span<const int> prefix, const Tensor& memory, const ModelParams& params,
                       const ForwardOptions& opts) {
  const DecoderConfig& cfg = params.config().decoder;
  if (!cfg.enabled()) throw InvalidArgument("model has no decoder");
  if (prefix.empty()) throw InvalidArgument("decoder prefix is empty");
  if (memory.rank() != 2 || memory.dim(1) != cfg.dim) {
    throw InvalidArgument("decoder memory must be rows x " + std::to_string(cfg.dim));
  }
  for (int id : prefix) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw InvalidArgument("token id " + std::to_string(id) + " outside vocabulary");
    }
  }
  const std::size_t n = prefix.size();
  Tensor x = scale(embedding(params.word_embed, prefix), std::sqrt(static_cast<double>(cfg.dim)));
  x = maybe_dropout(add(x, sinusoidal_positions(n, cfg.dim)), cfg.dropout, opts);
  const Tensor mask = causal_mask(n);
  for (std::size_t i = 0; i < params.decoder_layers.size(); ++i) {
    const DecoderLayerParams& layer = params.decoder_layers[i];
    Tensor h = norm(x, layer.ln1, cfg.ln_eps);
    h = multi_head_attention(h, h, layer.self_attn, cfg.heads, mask, opts.trace, "decoder.self", i);
    x = add(x, maybe_dropout(h, cfg.dropout, opts));
    h = norm(x, layer.ln2, cfg.ln_eps);
    h = multi_head_attention(h, memory, layer.cross_attn, cfg.heads, {}, opts.trace, "decoder.cross", i);
    x = add(x, maybe_dropout(h, cfg.dropout, opts));
    h = feed_forward(norm(x, layer.ln3, cfg.ln_eps), layer.ffn);
    x = add(x, maybe_dropout(h, cfg.dropout, opts));
  }
  return linear(norm(x, params.decoder_norm, cfg.ln_eps), params.out_weight, params.out_bias);
}

TagOutput tagging_head_forward(const Tensor& class_row, const ModelParams& params) {
  Tensor row = class_row;
  if (row.rank() == 1) row = reshape(row, {1, row.dim(0)});
  if (row.rank() != 2 || row.dim(0) != 1) throw InvalidArgument("tagging head expects a single class-token row");
  Tensor logits = linear(row, params.tag_weight, params.tag_bias);
  return {logits, sigmoid(logits)};
}

Tensor encode(const PatchSequence& patches, const ModelParams& params, const ForwardOptions& opts) {
  return encoder_forward(embed_patches(patches, params, opts), params, opts);
}

Tensor adapt_pretrained_patch_embedding(const Tensor& kernel) {
  if (kernel.rank() != 4) throw InvalidArgument("patch kernel must be C x t x F x d");
  if (kernel.dim(0) != 3) {
    throw InvalidArgument("patch kernel must have 3 channels, got " + std::to_string(kernel.dim(0)));
  }
  const std::size_t per_channel = kernel.numel() / 3;
  const std::size_t d = kernel.dim(3);
  auto k = kernel.data();
  std::vector<double> out(per_channel);
  for (std::size_t i = 0; i < per_channel; ++i) {
    out[i] = (k[i] + k[per_channel + i] + k[2 * per_channel + i]) / 3.0;
  }
  return Tensor({per_channel / d, d}, std::move(out));
}

}  // namespace act
