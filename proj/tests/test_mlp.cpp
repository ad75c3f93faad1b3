// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "neumat/mlp.h"
#include "neumat/rng.h"
#include "support.h"

using namespace neumat;
using namespace neumat::test;

TEST_CASE("param_count matches the architecture") {
    Mlp decoder = mlp_init({11, 25, 25, 25, 3}, true, 1);
    CHECK(param_count(decoder) == 1678);
    Mlp offset = mlp_init({9, 25, 25, 25, 1}, false, 1);
    CHECK(param_count(offset) == 1576);
    Mlp tiny = mlp_init({2, 3, 1}, false, 1);
    CHECK(param_count(tiny) == (2 + 1) * 3 + (3 + 1) * 1);
}

TEST_CASE("init is fan-in bounded with zero biases") {
    Mlp m = mlp_init({7, 25, 3}, true, 42);
    for (int l = 0; l < m.num_layers(); ++l) {
        Float bound = std::sqrt(6.0 / m.dims[l]);
        for (Float w : m.weights[l]) {
            CHECK(w <= bound);
            CHECK(w >= -bound);
        }
        for (Float b : m.biases[l])
            CHECK(b == 0.0);
    }
    // Reproducible, and sensitive to the seed.
    Mlp m2 = mlp_init({7, 25, 3}, true, 42);
    CHECK(m.weights[0] == m2.weights[0]);
    Mlp m3 = mlp_init({7, 25, 3}, true, 43);
    CHECK(m.weights[0] != m3.weights[0]);
}

TEST_CASE("forward computes the affine relu chain") {
    // One hidden unit pair, hand-checkable.
    Mlp m;
    m.dims = {2, 2, 1};
    m.final_relu = false;
    m.weights = {{1, -1, 2, 1}, {1, 1}};  // layer 0: w[in*2+out]
    m.biases = {{0.5, -0.5}, {0.25}};

    // h = relu(W0^T x + b0): h0 = 1*x0 + 2*x1 + 0.5, h1 = -x0 + x1 - 0.5
    // out = h0 + h1 + 0.25
    Float x[2] = {1.0, 0.5};
    Float out;
    MlpCache cache;
    mlp_forward(m, x, &out, cache);
    // h0 = 1 + 1 + 0.5 = 2.5; h1 = -1 + 0.5 - 0.5 = -1 -> relu 0
    CHECK(out == doctest::Approx(2.75).epsilon(1e-12));

    // final_relu clamps a negative output.
    m.biases[1][0] = -4.0;
    mlp_forward(m, x, &out, cache);
    CHECK(out == doctest::Approx(-1.5).epsilon(1e-12));
    m.final_relu = true;
    mlp_forward(m, x, &out, cache);
    CHECK(out == 0.0);
}

TEST_CASE("backward matches finite differences") {
    Pcg32 rng(5, 9);
    for (int iter = 0; iter < 6; ++iter) {
        Mlp m = mlp_init({4, 8, 8, 2}, iter % 2 == 0, 50 + iter);
        std::vector<Float> x(4), up(2);
        for (Float &v : x) v = rng.uniform(-1, 1);
        for (Float &v : up) v = rng.uniform(-1, 1);

        MlpCache cache;
        auto loss = [&]() {
            Float out[2];
            mlp_forward(m, x.data(), out, cache);
            return up[0] * out[0] + up[1] * out[1];
        };

        // Keep preactivations away from the relu kink.
        bool conditioned = true;
        loss();
        for (const auto &layer : cache.pre)
            for (Float v : layer)
                conditioned &= std::fabs(v) > 1e-3;
        if (!conditioned) continue;

        MlpGrads grads;
        grads.resize_like(m);
        std::vector<Float> d_input(4);
        Float out[2];
        mlp_forward(m, x.data(), out, cache);
        mlp_backward(m, cache, up.data(), grads, d_input.data());

        for (int i = 0; i < 4; ++i) {
            Float fd = central_diff(loss, &x[i], 1e-5);
            CHECK(rel_gap(d_input[i], fd) < 1e-5);
        }
        for (int l = 0; l < m.num_layers(); ++l) {
            for (size_t i = 0; i < m.weights[l].size(); i += 7) {
                Float fd = central_diff(loss, &m.weights[l][i], 1e-5);
                CHECK(rel_gap(grads.d_weights[l][i], fd) < 1e-5);
            }
            for (size_t i = 0; i < m.biases[l].size(); ++i) {
                Float fd = central_diff(loss, &m.biases[l][i], 1e-5);
                CHECK(rel_gap(grads.d_biases[l][i], fd) < 1e-5);
            }
        }
    }
}

TEST_CASE("backward accumulates across calls") {
    Mlp m = mlp_init({3, 4, 1}, false, 3);
    Float x[3] = {0.3, -0.2, 0.9};
    Float up = 1.0;
    MlpCache cache;
    Float out;
    mlp_forward(m, x, &out, cache);

    MlpGrads once, twice;
    once.resize_like(m);
    twice.resize_like(m);
    mlp_backward(m, cache, &up, once, nullptr);
    mlp_backward(m, cache, &up, twice, nullptr);
    mlp_backward(m, cache, &up, twice, nullptr);
    for (int l = 0; l < m.num_layers(); ++l)
        for (size_t i = 0; i < once.d_weights[l].size(); ++i)
            CHECK(twice.d_weights[l][i] == doctest::Approx(2 * once.d_weights[l][i]));
}

TEST_CASE("relu subgradient at zero is zero") {
    Mlp m;
    m.dims = {1, 1, 1};
    m.final_relu = false;
    m.weights = {{1.0}, {1.0}};
    m.biases = {{0.0}, {0.0}};
    Float x = 0.0;  // preactivation lands exactly on the kink
    MlpCache cache;
    Float out;
    mlp_forward(m, &x, &out, cache);
    MlpGrads grads;
    grads.resize_like(m);
    Float up = 1.0, d_input = -1;
    mlp_backward(m, cache, &up, grads, &d_input);
    CHECK(d_input == 0.0);
}
