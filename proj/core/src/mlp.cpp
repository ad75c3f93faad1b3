// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/mlp.h"

#include <cmath>
#include <cstring>

#include "neumat/rng.h"

namespace neumat {

int64_t param_count(const Mlp &m) {
    int64_t n = 0;
    for (int i = 0; i + 1 < static_cast<int>(m.dims.size()); ++i)
        n += static_cast<int64_t>(m.dims[i] + 1) * m.dims[i + 1];
    return n;
}

Mlp mlp_init(const std::vector<int> &dims, bool final_relu, uint64_t seed) {
    check_contract(dims.size() >= 2, "mlp_init: need at least one layer");
    for (int d : dims)
        check_contract(d >= 1, "mlp_init: layer dims must be positive");

    Mlp m;
    m.dims = dims;
    m.final_relu = final_relu;
    Pcg32 rng(seed);
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        int n_in = dims[i], n_out = dims[i + 1];
        Float bound = std::sqrt(6.0 / n_in);
        std::vector<Float> w(static_cast<size_t>(n_in) * n_out);
        for (Float &v : w)
            v = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(n_out, 0.0);
    }
    return m;
}

void MlpCache::resize(const Mlp &m) {
    act.resize(m.dims.size());
    pre.resize(m.num_layers());
    for (size_t i = 0; i < m.dims.size(); ++i)
        act[i].resize(m.dims[i]);
    for (int i = 0; i < m.num_layers(); ++i)
        pre[i].resize(m.dims[i + 1]);
}

void MlpGrads::resize_like(const Mlp &m) {
    d_weights.resize(m.weights.size());
    d_biases.resize(m.biases.size());
    for (size_t i = 0; i < m.weights.size(); ++i) {
        d_weights[i].assign(m.weights[i].size(), 0.0);
        d_biases[i].assign(m.biases[i].size(), 0.0);
    }
}

void MlpGrads::clear() {
    for (auto &w : d_weights)
        std::memset(w.data(), 0, w.size() * sizeof(Float));
    for (auto &b : d_biases)
        std::memset(b.data(), 0, b.size() * sizeof(Float));
}

void mlp_forward(const Mlp &m, const Float *input, Float *out, MlpCache &cache) {
    const int L = m.num_layers();
    if (cache.act.size() != m.dims.size())
        cache.resize(m);
    std::memcpy(cache.act[0].data(), input, m.dims[0] * sizeof(Float));

    for (int layer = 0; layer < L; ++layer) {
        const int n_in = m.dims[layer], n_out = m.dims[layer + 1];
        const Float *x = cache.act[layer].data();
        const Float *W = m.weights[layer].data();
        Float *z = cache.pre[layer].data();
        std::memcpy(z, m.biases[layer].data(), n_out * sizeof(Float));
        for (int i = 0; i < n_in; ++i) {
            const Float xi = x[i];
            const Float *row = W + static_cast<size_t>(i) * n_out;
            for (int o = 0; o < n_out; ++o)
                z[o] += xi * row[o];
        }
        bool relu = layer + 1 < L || m.final_relu;
        Float *a = cache.act[layer + 1].data();
        for (int o = 0; o < n_out; ++o)
            a[o] = relu && z[o] < 0 ? 0 : z[o];
    }
    std::memcpy(out, cache.act[L].data(), m.dims[L] * sizeof(Float));
}

void mlp_backward(const Mlp &m, const MlpCache &cache, const Float *upstream,
                  MlpGrads &grads, Float *d_input) {
    const int L = m.num_layers();
    std::vector<Float> g(upstream, upstream + m.dims[L]);
    std::vector<Float> g_prev;

    for (int layer = L - 1; layer >= 0; --layer) {
        const int n_in = m.dims[layer], n_out = m.dims[layer + 1];
        bool relu = layer + 1 < L || m.final_relu;
        const Float *z = cache.pre[layer].data();
        if (relu) {
            for (int o = 0; o < n_out; ++o)
                if (z[o] <= 0)
                    g[o] = 0;
        }

        const Float *x = cache.act[layer].data();
        Float *dW = grads.d_weights[layer].data();
        Float *db = grads.d_biases[layer].data();
        for (int o = 0; o < n_out; ++o)
            db[o] += g[o];
        for (int i = 0; i < n_in; ++i) {
            const Float xi = x[i];
            Float *row = dW + static_cast<size_t>(i) * n_out;
            for (int o = 0; o < n_out; ++o)
                row[o] += xi * g[o];
        }

        if (layer > 0 || d_input) {
            g_prev.assign(n_in, 0.0);
            const Float *W = m.weights[layer].data();
            for (int i = 0; i < n_in; ++i) {
                const Float *row = W + static_cast<size_t>(i) * n_out;
                Float acc = 0;
                for (int o = 0; o < n_out; ++o)
                    acc += row[o] * g[o];
                g_prev[i] = acc;
            }
            g.swap(g_prev);
        }
    }
    if (d_input)
        std::memcpy(d_input, g.data(), m.dims[0] * sizeof(Float));
}

}  // namespace neumat
