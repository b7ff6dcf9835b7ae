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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "act/error.hpp"
#include "act/numerics/gradcheck.hpp"
#include "act/numerics/ops.hpp"
#include "act/numerics/optim.hpp"
#include "test_util.hpp"

using namespace act;
using act::test::random_tensor;

TEST_SUITE("numerics") {

TEST_CASE("tensor shape invariants") {
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5)), InvalidArgument);
  CHECK_THROWS_AS(Tensor({0, 3}, {}), InvalidArgument);
  Tensor t = Tensor::zeros({2, 3}, true);
  CHECK(t.numel() == 6);
  CHECK(t.grad().size() == 6);
}

TEST_CASE("softmax") {
  SUBCASE("uniform input") {
    Tensor y = softmax(Tensor({3}, {0, 0, 0}), 0);
    for (double v : y.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("reference values") {
    // exp(k) / (e + e^2 + e^3), evaluated in long double.
    const long double denom = std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L);
    Tensor y = softmax(Tensor({3}, {1, 2, 3}), 0);
    const double expected[] = {0.09003057, 0.24472847, 0.66524096};
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(y.data()[k] - static_cast<double>(std::exp(k + 1.0L) / denom)) < 1e-15);
      CHECK(std::abs(y.data()[k] - expected[k]) < 5e-9);
    }
  }
  SUBCASE("shift invariance and large logits") {
    Tensor x = random_tensor({4, 5}, 3);
    std::vector<double> shifted(x.data().begin(), x.data().end());
    for (double& v : shifted) v += 1000.0;
    Tensor a = softmax(x, 1), b = softmax(Tensor({4, 5}, shifted), 1);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      CHECK(std::isfinite(b.data()[i]));
      CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-9));
    }
  }
  SUBCASE("any axis sums to one") {
    Tensor x = random_tensor({3, 4, 5}, 11, 3.0);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Tensor y = softmax(x, axis);
      const Shape& s = y.shape();
      std::size_t inner = 1;
      for (std::size_t i = axis + 1; i < 3; ++i) inner *= s[i];
      const std::size_t outer = y.numel() / (inner * s[axis]);
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          double total = 0.0;
          for (std::size_t j = 0; j < s[axis]; ++j) {
            const double v = y.data()[o * s[axis] * inner + j * inner + in];
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            total += v;
          }
          CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("axis out of range") { CHECK_THROWS_AS(softmax(Tensor::zeros({2, 2}), 2), InvalidArgument); }
}

TEST_CASE("layer_norm") {
  Tensor ones = Tensor::full({4}, 1.0), zeros = Tensor::zeros({4});
  SUBCASE("constant row maps to zero") {
    Tensor y = layer_norm(Tensor({1, 4}, {5, 5, 5, 5}), ones, zeros, 1e-5);
    for (double v : y.data()) CHECK(v == 0.0);
  }
  SUBCASE("two-element row") {
    Tensor y = layer_norm(Tensor({1, 2}, {1, 3}), Tensor::full({2}, 1.0), Tensor::zeros({2}), 1e-12);
    CHECK(y.data()[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(y.data()[1] == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("zero gain collapses to beta") {
    Tensor beta({4}, {0.5, -1, 2, 3});
    Tensor y = layer_norm(random_tensor({3, 4}, 5), Tensor::zeros({4}), beta, 1e-5);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t j = 0; j < 4; ++j) CHECK(y.at(r, j) == beta.data()[j]);
  }
  SUBCASE("moments") {
    Tensor y = layer_norm(random_tensor({6, 16}, 9, 4.0), Tensor::full({16}, 1.0), Tensor::zeros({16}), 1e-8);
    for (std::size_t r = 0; r < 6; ++r) {
      double mu = 0, var = 0;
      for (std::size_t j = 0; j < 16; ++j) mu += y.at(r, j) / 16;
      for (std::size_t j = 0; j < 16; ++j) var += (y.at(r, j) - mu) * (y.at(r, j) - mu) / 16;
      CHECK(std::abs(mu) < 1e-8);
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
  }
  SUBCASE("gain length mismatch") {
    CHECK_THROWS_AS(layer_norm(Tensor::zeros({2, 4}), Tensor::zeros({3}), Tensor::zeros({4})), InvalidArgument);
  }
}

TEST_CASE("gelu") {
  Tensor y = gelu(Tensor({3}, {0.0, 10.0, 1.0}));
  CHECK(y.data()[0] == 0.0);
  CHECK(std::abs(y.data()[1] - 10.0) < 1e-6);
  // 1 * Phi(1) with Phi(1) = (1 + erf(1/sqrt 2)) / 2.
  CHECK(std::abs(y.data()[2] - 0.8413447460685429) < 1e-12);
}

TEST_CASE("backward") {
  SUBCASE("sum gives ones") {
    Tensor x = random_tensor({3, 2}, 1, 1.0, true);
    backward(sum(x));
    for (double g : x.grad()) CHECK(g == 1.0);
  }
  SUBCASE("accumulates until reset") {
    Tensor x = random_tensor({4}, 2, 1.0, true);
    backward(sum(x));
    backward(sum(x));
    for (double g : x.grad()) CHECK(g == 2.0);
    x.zero_grad();
    for (double g : x.grad()) CHECK(g == 0.0);
  }
  SUBCASE("unused leaves keep zero gradient") {
    Tensor x = random_tensor({4}, 2, 1.0, true);
    Tensor unused = random_tensor({4}, 3, 1.0, true);
    backward(sum(mul(x, x)));
    for (double g : unused.grad()) CHECK(g == 0.0);
  }
  SUBCASE("softmax cross-entropy gradient") {
    Tensor z = random_tensor({1, 5}, 7, 1.0, true);
    const int target = 2;
    Tensor onehot({1, 5}, {0, 0, 1, 0, 0});
    Tensor loss = scale(sum(mul(onehot, log(softmax(z, 1)))), -1.0);
    backward(loss);
    Tensor p = softmax(z.detach(), 1);
    for (int k = 0; k < 5; ++k) {
      CHECK(z.grad()[k] == doctest::Approx(p.data()[k] - (k == target ? 1.0 : 0.0)).epsilon(1e-12));
    }
    auto f = [&](const Tensor& x) { return scale(sum(mul(onehot, log(softmax(x, 1)))), -1.0); };
    CHECK(finite_diff_check(f, z, 1e-5) < 1e-7);
  }
  SUBCASE("matmul against finite differences") {
    Tensor a = random_tensor({3, 4}, 11, 1.0, true);
    Tensor b = random_tensor({4, 2}, 12);
    CHECK(finite_diff_check([&](const Tensor& x) { return sum(matmul(x, b)); }, a, 1e-5) < 1e-5);
  }
  SUBCASE("non-scalar loss rejected") {
    Tensor x = random_tensor({2}, 1, 1.0, true);
    CHECK_THROWS_AS(backward(x), InvalidArgument);
  }
}

TEST_CASE("finite_diff_check") {
  Tensor x = random_tensor({6}, 21, 1.0, true);
  auto half_norm = [](const Tensor& t) { return scale(sum(mul(t, t)), 0.5); };
  CHECK(finite_diff_check(half_norm, x, 1e-4) < 1e-7);
  CHECK_THROWS_AS(finite_diff_check(half_norm, x, 0.0), NumericError);
  auto blow_up = [](const Tensor& t) { return sum(log(scale(t, 0.0))); };
  CHECK_THROWS_AS(finite_diff_check(blow_up, x, 1e-4), NumericError);
}

// Every differentiable op, contracted with a fixed random weight so the
// scalar loss exercises all output coordinates.
TEST_CASE("every op passes the gradient check on random shapes") {
  Rng shape_rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 1 + shape_rng.below(4), k = 1 + shape_rng.below(5), n = 2 + shape_rng.below(4);
    const std::uint64_t s = 1000 + trial * 10;
    Tensor a = random_tensor({m, k}, s);
    Tensor b = random_tensor({k, n}, s + 1);
    Tensor c = random_tensor({m, n}, s + 2);
    Tensor bt = random_tensor({n, k}, s + 3);
    Tensor row = random_tensor({n}, s + 4);
    Tensor gain = random_tensor({n}, s + 5);
    Tensor positive({m, n}, std::vector<double>(m * n, 0.0));
    {
      Rng r(s + 6);
      for (double& v : positive.mutable_data()) v = r.uniform(0.5, 2.0);
    }
    Tensor wmn = random_tensor({m, n}, s + 7);
    auto contract = [&](const Tensor& y) {
      return sum(mul(y, wmn.shape() == y.shape() ? wmn : random_tensor(y.shape(), s + 8)));
    };
    const std::vector<int> ids = {0, static_cast<int>(m - 1), 0};
    const std::vector<std::pair<const char*, std::function<Tensor(const Tensor&)>>> cases = {
        {"matmul lhs", [&](const Tensor& x) { return contract(matmul(x, b)); }},
        {"matmul rhs", [&](const Tensor& x) { return contract(matmul(a, x)); }},
        {"matmul_nt", [&](const Tensor& x) { return contract(matmul_nt(a, x)); }},
        {"transpose", [&](const Tensor& x) { return contract(transpose(transpose(x))); }},
        {"add/sub/mul", [&](const Tensor& x) { return contract(mul(sub(add(x, c), wmn), x)); }},
        {"add_row", [&](const Tensor& x) { return contract(add_row(c, x)); }},
        {"gelu", [&](const Tensor& x) { return contract(gelu(x)); }},
        {"sigmoid", [&](const Tensor& x) { return contract(sigmoid(x)); }},
        {"softplus", [&](const Tensor& x) { return contract(softplus(x)); }},
        {"log", [&](const Tensor& x) { return contract(log(x)); }},
        {"softmax axis0", [&](const Tensor& x) { return contract(softmax(x, 0)); }},
        {"softmax axis1", [&](const Tensor& x) { return contract(softmax(x, 1)); }},
        {"log_softmax", [&](const Tensor& x) { return contract(log_softmax(x)); }},
        {"layer_norm x", [&](const Tensor& x) { return contract(layer_norm(x, gain, row, 1e-5)); }},
        {"layer_norm gain", [&](const Tensor& x) { return contract(layer_norm(c, x, row, 1e-5)); }},
        {"embedding", [&](const Tensor& x) { return contract(embedding(x, ids)); }},
        {"concat/slice", [&](const Tensor& x) {
           Tensor parts[] = {slice_cols(x, 0, 1), slice_cols(x, 1, n)};
           return contract(slice_rows(concat_rows(concat_cols(parts), c), 0, m));
         }},
        {"reshape/mean", [&](const Tensor& x) { return mean(mul(reshape(x, {m * n}), reshape(x, {m * n}))); }},
    };
    for (const auto& [name, f] : cases) {
      const std::string case_name = name;
      CAPTURE(case_name);
      Tensor x = std::string(name) == "matmul lhs"   ? a.clone()
                 : std::string(name) == "matmul rhs" ? b.clone()
                 : std::string(name) == "matmul_nt"  ? bt.clone()
                 : std::string(name) == "add_row"    ? row.clone()
                 : std::string(name) == "log"        ? positive.clone()
                 : std::string(name) == "layer_norm gain" ? gain.clone()
                 : std::string(name) == "embedding"  ? random_tensor({m, n}, s + 9)
                                                     : c.clone();
      CHECK(finite_diff_check(f, x, 1e-4) < 1e-4);
    }
  }
}

TEST_CASE("adam") {
  SUBCASE("first step moves by lr against the gradient sign") {
    ParameterStore params;
    Tensor w = params.add("w", Tensor({2}, {1.0, -2.0}));
    w.mutable_grad()[0] = 0.3;
    w.mutable_grad()[1] = -4.0;
    AdamState state;
    const double lr = 1e-2;
    adam_step(params, state, lr);
    CHECK(state.step == 1);
    CHECK(std::abs((w.data()[0] - 1.0) + lr) <= lr * 1e-8 / (0.3 + 1e-8) + 1e-15);
    CHECK(std::abs((w.data()[1] + 2.0) - lr) <= lr * 1e-8 / (4.0 + 1e-8) + 1e-15);
    CHECK(w.grad()[0] == 0.3);
  }
  SUBCASE("zero gradient leaves parameters unchanged") {
    ParameterStore params;
    Tensor w = params.add("w", Tensor({3}, {1, 2, 3}));
    AdamState state;
    adam_step(params, state, 1e-3);
    CHECK(w.data()[0] == 1.0);
    CHECK(w.data()[2] == 3.0);
  }
  SUBCASE("steps reduce a convex quadratic") {
    ParameterStore params;
    Tensor w = params.add("w", Tensor({3}, {1.5, -0.5, 2.0}));
    AdamState state;
    auto loss = [&] { return sum(mul(w, w)); };
    double previous = loss().item();
    for (int i = 0; i < 2; ++i) {
      params.zero_grad();
      backward(loss());
      adam_step(params, state, 0.1);
      const double now = loss().item();
      CHECK(now < previous);
      previous = now;
    }
    CHECK(state.step == 2);
  }
  SUBCASE("non-positive lr rejected") {
    ParameterStore params;
    params.add("w", Tensor::zeros({1}));
    AdamState state;
    CHECK_THROWS_AS(adam_step(params, state, 0.0), InvalidArgument);
  }
}

TEST_CASE("seeded computations are bit-identical") {
  auto run = [] {
    Rng rng(5);
    Tensor x = random_tensor({4, 8}, 17);
    Tensor y = dropout(gelu(x), 0.3, true, rng);
    return std::vector<double>(y.data().begin(), y.data().end());
  };
  CHECK(run() == run());
}

TEST_CASE("dropout") {
  Rng rng(1);
  Tensor x = Tensor::full({1000}, 1.0);
  CHECK(dropout(x, 0.5, false, rng).data()[0] == 1.0);
  Tensor y = dropout(x, 0.5, true, rng);
  std::size_t zeros = 0;
  for (double v : y.data()) {
    CHECK((v == 0.0 || v == 2.0));
    zeros += v == 0.0;
  }
  CHECK(zeros > 400);
  CHECK(zeros < 600);
  CHECK_THROWS_AS(dropout(x, 1.0, true, rng), InvalidArgument);
}

}  // TEST_SUITE
