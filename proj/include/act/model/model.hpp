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
#include <span>
#include <string>
#include <vector>

#include "act/audio/frontend.hpp"
#include "act/model/params.hpp"
#include "act/numerics/random.hpp"
#include "act/numerics/tensor.hpp"

namespace act {

struct AttentionRecord {
  std::string site;  // "encoder.self", "decoder.self" or "decoder.cross"
  std::size_t layer = 0;
  std::size_t head = 0;
  Tensor weights;  // queries x keys, detached
};
using AttentionTrace = std::vector<AttentionRecord>;

struct ForwardOptions {
  bool train = false;
  Rng* rng = nullptr;              // required when train and dropout > 0
  AttentionTrace* trace = nullptr;  // optional capture of attention weights
};

// Class token followed by embedded patches, plus positions: (N+1) x d.
Tensor embed_patches(const Tensor& patches, const ModelParams& params, const ForwardOptions& opts = {});
Tensor embed_patches(const PatchSequence& patches, const ModelParams& params, const ForwardOptions& opts = {});

// Additive mask of shape rows x rows: 0 on and below the diagonal, -inf above.
Tensor causal_mask(std::size_t rows);

// Scaled dot-product attention over `heads` heads. `mask`, when defined, is
// added to the queries x keys logits before the softmax.
Tensor multi_head_attention(const Tensor& xq, const Tensor& xkv, const AttentionParams& attn, std::size_t heads,
                            const Tensor& mask = {}, AttentionTrace* trace = nullptr, const std::string& site = {},
                            std::size_t layer = 0);

Tensor encoder_forward(const Tensor& embedded, const ModelParams& params, const ForwardOptions& opts = {});

// Encoder rows projected to the decoder width (identity when widths match).
Tensor decoder_memory(const Tensor& encoded, const ModelParams& params);

// Vocabulary logits, one row per prefix position.
Tensor decoder_forward(std::span<const int> prefix, const Tensor& memory, const ModelParams& params,
                       const ForwardOptions& opts = {});

struct TagOutput {
  Tensor logits;  // 1 x K
  Tensor probs;   // 1 x K
};
TagOutput tagging_head_forward(const Tensor& class_row, const ModelParams& params);

// Patches -> encoder rows, the usual entry point.
Tensor encode(const PatchSequence& patches, const ModelParams& params, const ForwardOptions& opts = {});

// Averages a [3, t, F, d] kernel over channels into a [t*F, d] patch embedding.
Tensor adapt_pretrained_patch_embedding(const Tensor& kernel);

// Fixed sinusoidal positions for the decoder: rows x d.
Tensor sinusoidal_positions(std::size_t rows, std::size_t dim);

}  // namespace act
