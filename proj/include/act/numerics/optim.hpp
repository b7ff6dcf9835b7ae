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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "act/numerics/tensor.hpp"

namespace act {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Ordered collection of trainable tensors. Insertion order is the
// serialisation and update order.
class ParameterStore {
 public:
  // Registers a leaf and turns on requires_grad. Names must be unique.
  Tensor add(std::string name, Tensor tensor);
  const Tensor& get(const std::string& name) const;
  const Tensor* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  std::vector<NamedTensor>::const_iterator begin() const { return entries_.begin(); }
  std::vector<NamedTensor>::const_iterator end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t total_numel() const;
  void zero_grad() const;

 private:
  std::vector<NamedTensor> entries_;
  std::map<std::string, std::size_t> index_;
};

struct AdamState {
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
};

using ParameterFilter = std::function<bool(const std::string&)>;

// One bias-corrected Adam update of every parameter accepted by `filter`
// (all when empty). Gradients are left untouched.
void adam_step(const ParameterStore& params, AdamState& state, double lr, const ParameterFilter& filter = {});

}  // namespace act
