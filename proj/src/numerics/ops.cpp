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

#include "act/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "act/error.hpp"

namespace act {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

std::atomic<bool> g_gelu_fault{false};

using NodePtr = std::shared_ptr<detail::Node>;
using BackwardFn = std::function<void(detail::Node&)>;

// Creates the output node; the graph is only recorded when some input needs it.
Tensor make_result(Shape shape, std::vector<double> values, std::initializer_list<const Tensor*> inputs,
                   const char* op, BackwardFn fn) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  bool needs = false;
  if (grad_recording_enabled()) {
    for (const Tensor* t : inputs) needs = needs || t->requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->is_leaf = false;
    node->op = op;
    for (const Tensor* t : inputs) node->parents.push_back(t->node_ptr());
    node->backward_fn = std::move(fn);
  }
  return Tensor::from_node(std::move(node));
}

// Gradient buffer of parent i, or nullptr when it does not need one.
double* parent_grad(detail::Node& self, std::size_t i) {
  detail::Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  p.ensure_grad();
  return p.grad.data();
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (!t.defined()) throw InvalidArgument(std::string(op) + ": undefined tensor");
  if (t.rank() != rank) {
    throw InvalidArgument(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                          shape_to_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw InvalidArgument(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                          shape_to_string(b.shape()));
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw InvalidArgument("matmul: inner dimensions differ " + shape_to_string(a.shape()) + " x " +
                          shape_to_string(b.shape()));
  }
  std::vector<double> out(m * n);
  MatMap(out.data(), m, n).noalias() = ConstMatMap(a.data().data(), m, k) * ConstMatMap(b.data().data(), k, n);
  return make_result({m, n}, std::move(out), {&a, &b}, "matmul", [m, k, n](detail::Node& self) {
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    ConstMatMap dC(self.grad.data(), m, n);
    if (double* ga = parent_grad(self, 0)) {
      MatMap(ga, m, k).noalias() += dC * ConstMatMap(B.data(), k, n).transpose();
    }
    if (double* gb = parent_grad(self, 1)) {
      MatMap(gb, k, n).noalias() += ConstMatMap(A.data(), m, k).transpose() * dC;
    }
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul_nt");
  require_rank(b, 2, "matmul_nt");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) {
    throw InvalidArgument("matmul_nt: inner dimensions differ " + shape_to_string(a.shape()) + " x " +
                          shape_to_string(b.shape()) + "^T");
  }
  std::vector<double> out(m * n);
  MatMap(out.data(), m, n).noalias() =
      ConstMatMap(a.data().data(), m, k) * ConstMatMap(b.data().data(), n, k).transpose();
  return make_result({m, n}, std::move(out), {&a, &b}, "matmul_nt", [m, k, n](detail::Node& self) {
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    ConstMatMap dC(self.grad.data(), m, n);
    if (double* ga = parent_grad(self, 0)) {
      MatMap(ga, m, k).noalias() += dC * ConstMatMap(B.data(), n, k);
    }
    if (double* gb = parent_grad(self, 1)) {
      MatMap(gb, n, k).noalias() += dC.transpose() * ConstMatMap(A.data(), m, k);
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> out(m * n);
  MatMap(out.data(), n, m) = ConstMatMap(a.data().data(), m, n).transpose();
  return make_result({n, m}, std::move(out), {&a}, "transpose", [m, n](detail::Node& self) {
    if (double* ga = parent_grad(self, 0)) {
      MatMap(ga, m, n) += ConstMatMap(self.grad.data(), n, m).transpose();
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  Tensor y = matmul(x, weight);
  return bias.defined() ? add_row(y, bias) : y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, "add", [](detail::Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (double* g = parent_grad(self, p)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.numel());
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, "sub", [](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (double* g = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, "mul", [](detail::Node& self) {
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * B[i];
    }
    if (double* g = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * A[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  return make_result(a.shape(), std::move(out), {&a}, "scale", [factor](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * factor;
    }
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  require_rank(a, 2, "add_row");
  const std::size_t m = a.dim(0), n = a.dim(1);
  if (row.numel() != n) {
    throw InvalidArgument("add_row: row of " + std::to_string(row.numel()) + " values for width " +
                          std::to_string(n));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  auto rv = row.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += rv[j];
  return make_result(a.shape(), std::move(out), {&a, &row}, "add_row", [m, n](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (double* g = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
    }
  });
}

Tensor gelu(const Tensor& x) {
  std::vector<double> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * normal_cdf(xv[i]);
  const double fault = g_gelu_fault.load() ? 1.05 : 1.0;
  return make_result(x.shape(), std::move(out), {&x}, "gelu", [fault](detail::Node& self) {
    const auto& X = self.parents[0]->value;
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        g[i] += fault * self.grad[i] * (normal_cdf(X[i]) + X[i] * normal_pdf(X[i]));
      }
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i];
    out[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return make_result(x.shape(), std::move(out), {&x}, "sigmoid", [](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const double s = self.value[i];
        g[i] += self.grad[i] * s * (1.0 - s);
      }
    }
  });
}

Tensor softplus(const Tensor& x) {
  std::vector<double> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i];
    out[i] = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
  }
  return make_result(x.shape(), std::move(out), {&x}, "softplus", [](detail::Node& self) {
    const auto& X = self.parents[0]->value;
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const double v = X[i];
        const double s = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        g[i] += self.grad[i] * s;
      }
    }
  });
}

Tensor log(const Tensor& x) {
  std::vector<double> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(xv[i]);
  return make_result(x.shape(), std::move(out), {&x}, "log", [](detail::Node& self) {
    const auto& X = self.parents[0]->value;
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] / X[i];
    }
  });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (!x.defined()) throw InvalidArgument("softmax: undefined tensor");
  const Shape& s = x.shape();
  if (axis >= s.size()) {
    throw InvalidArgument("softmax: axis " + std::to_string(axis) + " out of range for " + shape_to_string(s));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < len; ++j) mx = std::max(mx, xv[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const double e = std::exp(xv[base + j * inner] - mx);
        out[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
    }
  }
  return make_result(s, std::move(out), {&x}, "softmax", [outer, inner, len](detail::Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const auto& y = self.value;
    const auto& dy = self.grad;
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * len * inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < len; ++j) dot += dy[base + j * inner] * y[base + j * inner];
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t idx = base + j * inner;
          g[idx] += y[idx] * (dy[idx] - dot);
        }
      }
    }
  });
}

Tensor log_softmax(const Tensor& x) {
  if (!x.defined() || x.rank() == 0) throw InvalidArgument("log_softmax: undefined tensor");
  const std::size_t len = x.shape().back();
  const std::size_t rows = x.numel() / len;
  auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * len;
    const double mx = *std::max_element(row, row + len);
    double total = 0.0;
    for (std::size_t j = 0; j < len; ++j) total += std::exp(row[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < len; ++j) out[r * len + j] = row[j] - lse;
  }
  return make_result(x.shape(), std::move(out), {&x}, "log_softmax", [rows, len](detail::Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* dy = self.grad.data() + r * len;
      const double* y = self.value.data() + r * len;
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) total += dy[j];
      for (std::size_t j = 0; j < len; ++j) g[r * len + j] += dy[j] - std::exp(y[j]) * total;
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (!x.defined() || x.rank() == 0) throw InvalidArgument("layer_norm: undefined tensor");
  const std::size_t d = x.shape().back();
  if (d == 0) throw InvalidArgument("layer_norm: empty normalisation axis");
  if (gamma.numel() != d || beta.numel() != d) {
    throw InvalidArgument("layer_norm: gamma/beta must have " + std::to_string(d) + " values");
  }
  const std::size_t rows = x.numel() / d;
  auto xv = x.data(), gv = gamma.data(), bv = beta.data();
  std::vector<double> out(xv.size());
  // Normalised activations and inverse std are kept for the backward pass.
  auto xhat = std::make_shared<std::vector<double>>(xv.size());
  auto rstd = std::make_shared<std::vector<double>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*rstd)[r] = inv;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * inv;
      (*xhat)[r * d + j] = h;
      out[r * d + j] = gv[j] * h + bv[j];
    }
  }
  return make_result(x.shape(), std::move(out), {&x, &gamma, &beta}, "layer_norm",
                     [rows, d, xhat, rstd](detail::Node& self) {
                       const auto& G = self.parents[1]->value;
                       double* gx = parent_grad(self, 0);
                       double* gg = parent_grad(self, 1);
                       double* gb = parent_grad(self, 2);
                       const double n = static_cast<double>(d);
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double* dy = self.grad.data() + r * d;
                         const double* h = xhat->data() + r * d;
                         double sum_dh = 0.0, sum_dh_h = 0.0;
                         for (std::size_t j = 0; j < d; ++j) {
                           const double dh = dy[j] * G[j];
                           sum_dh += dh;
                           sum_dh_h += dh * h[j];
                           if (gg) gg[j] += dy[j] * h[j];
                           if (gb) gb[j] += dy[j];
                         }
                         if (gx) {
                           const double inv = (*rstd)[r];
                           for (std::size_t j = 0; j < d; ++j) {
                             const double dh = dy[j] * G[j];
                             gx[r * d + j] += inv / n * (n * dh - sum_dh - h[j] * sum_dh_h);
                           }
                         }
                       }
                     });
}

Tensor dropout(const Tensor& x, double p, bool train, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw InvalidArgument("dropout: rate must be in [0, 1)");
  if (!train || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  auto mask = std::make_shared<std::vector<double>>(x.numel());
  for (double& m : *mask) m = rng.bernoulli(p) ? 0.0 : keep_scale;
  std::vector<double> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * (*mask)[i];
  return make_result(x.shape(), std::move(out), {&x}, "dropout", [mask](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * (*mask)[i];
    }
  });
}

Tensor embedding(const Tensor& table, std::span<const int> ids) {
  require_rank(table, 2, "embedding");
  if (ids.empty()) throw InvalidArgument("embedding: no ids");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<int> rows(ids.begin(), ids.end());
  std::vector<double> out(rows.size() * d);
  auto tv = table.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<std::size_t>(rows[i]) >= vocab) {
      throw InvalidArgument("embedding: id " + std::to_string(rows[i]) + " outside table of " +
                            std::to_string(vocab) + " rows");
    }
    std::copy_n(tv.data() + rows[i] * d, d, out.data() + i * d);
  }
  const std::size_t n = rows.size();
  return make_result({n, d}, std::move(out), {&table}, "embedding",
                     [rows = std::move(rows), d](detail::Node& self) {
                       if (double* g = parent_grad(self, 0)) {
                         for (std::size_t i = 0; i < rows.size(); ++i)
                           for (std::size_t j = 0; j < d; ++j) g[rows[i] * d + j] += self.grad[i * d + j];
                       }
                     });
}

Tensor concat_rows(const Tensor& top, const Tensor& bottom) {
  require_rank(top, 2, "concat_rows");
  require_rank(bottom, 2, "concat_rows");
  if (top.dim(1) != bottom.dim(1)) throw InvalidArgument("concat_rows: column counts differ");
  const std::size_t split = top.numel();
  std::vector<double> out(top.data().begin(), top.data().end());
  out.insert(out.end(), bottom.data().begin(), bottom.data().end());
  return make_result({top.dim(0) + bottom.dim(0), top.dim(1)}, std::move(out), {&top, &bottom}, "concat_rows",
                     [split](detail::Node& self) {
                       if (double* g = parent_grad(self, 0)) {
                         for (std::size_t i = 0; i < split; ++i) g[i] += self.grad[i];
                       }
                       if (double* g = parent_grad(self, 1)) {
                         for (std::size_t i = split; i < self.grad.size(); ++i) g[i - split] += self.grad[i];
                       }
                     });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw InvalidArgument("concat_cols: no inputs");
  for (const Tensor& p : parts) require_rank(p, 2, "concat_cols");
  const std::size_t rows = parts[0].dim(0);
  std::vector<std::size_t> offsets;
  std::size_t width = 0;
  for (const Tensor& p : parts) {
    if (p.dim(0) != rows) throw InvalidArgument("concat_cols: row counts differ");
    offsets.push_back(width);
    width += p.dim(1);
  }
  std::vector<double> out(rows * width);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t w = parts[k].dim(1);
    auto pv = parts[k].data();
    for (std::size_t i = 0; i < rows; ++i) std::copy_n(pv.data() + i * w, w, out.data() + i * width + offsets[k]);
  }
  // make_result takes a fixed list, so build the node by hand for n-ary input.
  auto node = std::make_shared<detail::Node>();
  node->shape = {rows, width};
  node->value = std::move(out);
  bool needs = false;
  if (grad_recording_enabled()) {
    for (const Tensor& p : parts) needs = needs || p.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->is_leaf = false;
    node->op = "concat_cols";
    std::vector<std::size_t> widths;
    for (const Tensor& p : parts) {
      node->parents.push_back(p.node_ptr());
      widths.push_back(p.dim(1));
    }
    node->backward_fn = [rows, width, offsets, widths](detail::Node& self) {
      for (std::size_t k = 0; k < widths.size(); ++k) {
        double* g = parent_grad(self, k);
        if (!g) continue;
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j) g[i * widths[k] + j] += self.grad[i * width + offsets[k] + j];
      }
    };
  }
  return Tensor::from_node(std::move(node));
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice_rows");
  if (begin >= end || end > x.dim(0)) throw InvalidArgument("slice_rows: bad range");
  const std::size_t d = x.dim(1);
  auto xv = x.data();
  std::vector<double> out(xv.begin() + begin * d, xv.begin() + end * d);
  return make_result({end - begin, d}, std::move(out), {&x}, "slice_rows", [begin, d](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * d + i] += self.grad[i];
    }
  });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice_cols");
  if (begin >= end || end > x.dim(1)) throw InvalidArgument("slice_cols: bad range");
  const std::size_t rows = x.dim(0), width = x.dim(1), w = end - begin;
  auto xv = x.data();
  std::vector<double> out(rows * w);
  for (std::size_t i = 0; i < rows; ++i) std::copy_n(xv.data() + i * width + begin, w, out.data() + i * w);
  return make_result({rows, w}, std::move(out), {&x}, "slice_cols", [rows, width, begin, w](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < w; ++j) g[i * width + begin + j] += self.grad[i * w + j];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw InvalidArgument("reshape: " + shape_to_string(x.shape()) + " -> " + shape_to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {&x}, "reshape", [](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return make_result({1}, {total}, {&x}, "sum", [](detail::Node& self) {
    if (double* g = parent_grad(self, 0)) {
      const std::size_t n = self.parents[0]->value.size();
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

namespace testing {
BackwardFaultGuard::BackwardFaultGuard() { g_gelu_fault.store(true); }
BackwardFaultGuard::~BackwardFaultGuard() { g_gelu_fault.store(false); }
}  // namespace testing

}  // namespace act
