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

#include "act/numerics/optim.hpp"

#include <cmath>

#include "act/error.hpp"

namespace act {

Tensor ParameterStore::add(std::string name, Tensor tensor) {
  if (index_.count(name)) throw InvalidArgument("duplicate parameter name: " + name);
  tensor.set_requires_grad(true);
  index_[name] = entries_.size();
  entries_.push_back({std::move(name), tensor});
  return tensor;
}

const Tensor* ParameterStore::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second].tensor;
}

const Tensor& ParameterStore::get(const std::string& name) const {
  const Tensor* t = find(name);
  if (!t) throw InvalidArgument("unknown parameter: " + name);
  return *t;
}

std::size_t ParameterStore::total_numel() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

void ParameterStore::zero_grad() const {
  for (auto& e : entries_) {
    Tensor t = e.tensor;
    t.zero_grad();
  }
}

void adam_step(const ParameterStore& params, AdamState& state, double lr, const ParameterFilter& filter) {
  if (!(lr > 0.0)) throw InvalidArgument("adam_step: learning rate must be positive");
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (const auto& entry : params) {
    if (filter && !filter(entry.name)) continue;
    Tensor p = entry.tensor;
    if (!p.has_grad()) continue;
    auto& m = state.m[entry.name];
    auto& v = state.v[entry.name];
    if (m.size() != p.numel()) m.assign(p.numel(), 0.0);
    if (v.size() != p.numel()) v.assign(p.numel(), 0.0);
    auto w = p.mutable_data();
    auto g = p.grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace act
