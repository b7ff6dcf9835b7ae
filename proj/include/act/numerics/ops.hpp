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

#include "act/numerics/random.hpp"
#include "act/numerics/tensor.hpp"

namespace act {

// Linear algebra on rank-2 tensors.
Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k] x [k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // [m,k] x [n,k]^T
Tensor transpose(const Tensor& a);
// x[m,k] W[k,n] + b[n]; bias may be undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// a[m,n] + row[n] broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);

Tensor gelu(const Tensor& x);  // exact erf form
Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor log(const Tensor& x);

// Softmax along an arbitrary axis; the axis max is subtracted first.
Tensor softmax(const Tensor& x, std::size_t axis);
// Log-softmax along the last axis.
Tensor log_softmax(const Tensor& x);
// Normalises over the last axis with population variance.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
// Inverted dropout; identity when !train or p == 0.
Tensor dropout(const Tensor& x, double p, bool train, Rng& rng);

// Rows of table[V,d] selected by ids -> [ids.size(), d].
Tensor embedding(const Tensor& table, std::span<const int> ids);
Tensor concat_rows(const Tensor& top, const Tensor& bottom);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& x, Shape shape);

Tensor sum(const Tensor& x);   // -> scalar
Tensor mean(const Tensor& x);  // -> scalar

namespace testing {
// Scales the GELU backward rule by a wrong factor while alive; used to prove
// the gradient checker notices a broken rule.
class BackwardFaultGuard {
 public:
  BackwardFaultGuard();
  ~BackwardFaultGuard();
  BackwardFaultGuard(const BackwardFaultGuard&) = delete;
  BackwardFaultGuard& operator=(const BackwardFaultGuard&) = delete;
};
}  // namespace testing

}  // namespace act
