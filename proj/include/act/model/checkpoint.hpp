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

// Binary checkpoint: 8-byte magic, little-endian u64 header length, a JSON
// header, then every tensor as contiguous little-endian f64 values at the
// byte offset recorded in the header (relative to the start of the blob).

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "act/model/params.hpp"
#include "act/numerics/optim.hpp"

namespace act {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string kind;  // "tagging" or "caption"
  std::uint64_t epoch = 0;
  std::string run_config;  // serialized run configuration, opaque here
  std::vector<std::string> vocabulary;  // words in id order, empty if none
  std::vector<std::string> tag_classes;  // tagging head labels in column order
};

struct CheckpointData {
  CheckpointMeta meta;
  ModelConfig model;
  std::vector<NamedTensor> tensors;  // model parameters in file order
  std::optional<AdamState> adam;

  const Tensor* find(const std::string& name) const;
};

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const CheckpointMeta& meta,
                     const AdamState* adam = nullptr);
CheckpointData load_checkpoint(const std::filesystem::path& path);

// Rebuilds parameters from a checkpoint; every stored tensor must match the
// shape implied by the stored config.
ModelParams restore_params(const CheckpointData& data);

// Copies the tensors whose names start with one of `prefixes` from `source`
// into `target`. Shape mismatches raise ValidationError naming the tensor.
// Returns the number of tensors copied.
std::size_t copy_matching_tensors(const CheckpointData& source, const ModelParams& target,
                                  const std::vector<std::string>& prefixes);

}  // namespace act
