// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end derivative checks for the full material evaluation chain
// (trilinear pyramid fetch -> neural offset -> decoder) against central
// finite differences. Queries are filtered away from the chain's kinks
// (ReLU zero crossings, bilinear cell edges, the grazing-wo clamp) so the
// two-sided difference measures the same one-sided slope the analytic
// backward pass reports.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "neumat/material.h"
#include "neumat/oracle.h"
#include "support.h"

using namespace neumat;
using namespace neumat::test;

namespace {

constexpr Float kPreMargin = 1e-3;
constexpr Float kCellMargin = 1e-3;

bool grad_close(Float analytic, Float fd, Float tol) {
    Float m = std::max(std::fabs(analytic), std::fabs(fd));
    if (m < 1e-9)
        return true;
    return std::fabs(analytic - fd) <= tol * m;
}

bool relu_layers_conditioned(const Mlp &m, const MlpCache &cache) {
    for (int layer = 0; layer < m.num_layers(); ++layer) {
        if (layer + 1 == m.num_layers() && !m.final_relu)
            continue;
        for (Float v : cache.pre[layer])
            if (std::fabs(v) < kPreMargin)
                return false;
    }
    return true;
}

bool taps_conditioned(const FeatureTexture &tex, Vec2 p) {
    BilinearTaps taps = bilinear_taps(tex, p);
    return taps.fu > kCellMargin && taps.fu < 1 - kCellMargin &&
           taps.fv > kCellMargin && taps.fv < 1 - kCellMargin;
}

bool chain_conditioned(const MbtfMaterial &mat, const Query &q,
                       const EvalContext &ctx) {
    if (!relu_layers_conditioned(mat.decoder, ctx.decoder_cache))
        return false;
    if (ctx.used_offset) {
        if (!relu_layers_conditioned(mat.offset.mlp, ctx.offset_cache))
            return false;
        if (std::fabs(q.wo.z() - kOffsetZMin) < 1e-2)
            return false;
    }
    LevelBlend lb = level_blend(q.sigma, mat.k());
    if (!taps_conditioned(mat.pyramid.levels[lb.lo], ctx.p_lookup))
        return false;
    if (lb.hi != lb.lo &&
        !taps_conditioned(mat.pyramid.levels[lb.hi], ctx.p_lookup))
        return false;
    return true;
}

void randomize_textures(MbtfMaterial &mat, Pcg32 &rng) {
    for (auto &level : mat.pyramid.levels)
        for (Float &x : level.data)
            x = rng.uniform(-0.5, 0.5);
    if (mat.has_offset)
        for (Float &x : mat.offset.texture.data)
            x = rng.uniform(-0.5, 0.5);
}

Query draw_query(int k, Pcg32 &rng) {
    Query q;
    q.p = {rng.next_double(), rng.next_double()};
    q.sigma = std::exp2(-rng.uniform(0.2, k - 0.2));
    q.wi = sample_query_direction(rng);
    do {
        q.wo = sample_query_direction(rng);
    } while (q.wo.z() < 0.12);
    return q;
}

// One conditioned (material, query) draw; the caller owns the rng stream.
struct ChainFixture {
    MbtfMaterial mat;
    Query q;
    Rgb coef{0.3, -0.8, 0.55};
    MaterialGrads grads;

    bool build(bool with_offset, Pcg32 &rng) {
        int k = 2 + static_cast<int>(rng.next_below(2));
        int c = 3 + static_cast<int>(rng.next_below(3));
        mat = material_init(k, c, 3, with_offset, rng.next_u32());
        randomize_textures(mat, rng);
        EvalContext ctx;
        for (int attempt = 0; attempt < 40; ++attempt) {
            q = draw_query(k, rng);
            with_offset ? eval(mat, q, ctx) : eval_baseline(mat, q, ctx);
            if (chain_conditioned(mat, q, ctx)) {
                grads.resize_like(mat);
                grads.clear();
                eval_backward(mat, q, ctx, coef, grads);
                return true;
            }
        }
        return false;
    }

    Float forward() {
        EvalContext scratch;
        Rgb v = mat.has_offset ? eval(mat, q, scratch)
                               : eval_baseline(mat, q, scratch);
        return dot(coef, v);
    }

    // FD against the analytic gradient for the parameter at *x.
    bool check_param(Float *x, Float analytic, Float tol) {
        Float fd = central_diff([&] { return forward(); }, x, fd_step(*x));
        return grad_close(analytic, fd, tol);
    }
};

}  // namespace

TEST_CASE("full chain gradients match finite differences") {
    Pcg32 rng(101, 1);
    int configs = 0;
    for (int trial = 0; trial < 24 && configs < 10; ++trial) {
        ChainFixture fx;
        if (!fx.build(true, rng))
            continue;
        ++configs;
        const Float tol = 1e-3;
        MbtfMaterial &mat = fx.mat;

        LevelBlend lb = level_blend(fx.q.sigma, mat.k());
        EvalContext ctx;
        eval(mat, fx.q, ctx);
        for (int level : {lb.lo, lb.hi}) {
            FeatureTexture &tex = mat.pyramid.levels[level];
            BilinearTaps taps = bilinear_taps(tex, ctx.p_lookup);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int ch : {0, mat.channels() - 1}) {
                        Float *x = tex.texel(taps.col[a], taps.row[b]) + ch;
                        Float g = fx.grads.pyramid[level].texel(taps.col[a],
                                                                taps.row[b])[ch];
                        CHECK(fx.check_param(x, g, tol));
                    }
            if (lb.hi == lb.lo)
                break;
        }

        for (int layer = 0; layer < mat.decoder.num_layers(); ++layer) {
            auto &w = mat.decoder.weights[layer];
            for (int rep = 0; rep < 2; ++rep) {
                size_t idx = rng.next_below(static_cast<uint32_t>(w.size()));
                CHECK(fx.check_param(&w[idx], fx.grads.decoder.d_weights[layer][idx],
                                     tol));
            }
            size_t bi = rng.next_below(
                static_cast<uint32_t>(mat.decoder.biases[layer].size()));
            CHECK(fx.check_param(&mat.decoder.biases[layer][bi],
                                 fx.grads.decoder.d_biases[layer][bi], tol));
        }

        BilinearTaps otaps = bilinear_taps(mat.offset.texture, fx.q.p);
        for (int ch : {0, mat.offset_channels() - 1}) {
            Float *x = mat.offset.texture.texel(otaps.col[0], otaps.row[0]) + ch;
            Float g = fx.grads.offset_texture.texel(otaps.col[0], otaps.row[0])[ch];
            CHECK(fx.check_param(x, g, tol));
        }

        for (int layer = 0; layer < mat.offset.mlp.num_layers(); ++layer) {
            auto &w = mat.offset.mlp.weights[layer];
            size_t idx = rng.next_below(static_cast<uint32_t>(w.size()));
            CHECK(fx.check_param(&w[idx], fx.grads.offset_mlp.d_weights[layer][idx],
                                 tol));
            size_t bi = rng.next_below(
                static_cast<uint32_t>(mat.offset.mlp.biases[layer].size()));
            CHECK(fx.check_param(&mat.offset.mlp.biases[layer][bi],
                                 fx.grads.offset_mlp.d_biases[layer][bi], tol));
        }
    }
    // The conditioning filter must not starve the suite.
    CHECK(configs >= 6);
}

TEST_CASE("baseline chain gradients match finite differences") {
    Pcg32 rng(102, 1);
    int configs = 0;
    for (int trial = 0; trial < 16 && configs < 6; ++trial) {
        ChainFixture fx;
        if (!fx.build(false, rng))
            continue;
        ++configs;
        const Float tol = 1e-3;
        MbtfMaterial &mat = fx.mat;

        LevelBlend lb = level_blend(fx.q.sigma, mat.k());
        BilinearTaps taps = bilinear_taps(mat.pyramid.levels[lb.lo], fx.q.p);
        Float *x = mat.pyramid.levels[lb.lo].texel(taps.col[1], taps.row[1]);
        CHECK(fx.check_param(
            x, fx.grads.pyramid[lb.lo].texel(taps.col[1], taps.row[1])[0], tol));

        for (int layer = 0; layer < mat.decoder.num_layers(); ++layer) {
            auto &w = mat.decoder.weights[layer];
            size_t idx = rng.next_below(static_cast<uint32_t>(w.size()));
            CHECK(fx.check_param(&w[idx], fx.grads.decoder.d_weights[layer][idx],
                                 tol));
        }
    }
    CHECK(configs >= 4);
}

TEST_CASE("backward accumulates rather than overwrites") {
    Pcg32 rng(103, 1);
    ChainFixture fx;
    REQUIRE(fx.build(true, rng));
    MaterialGrads twice;
    twice.resize_like(fx.mat);
    twice.clear();
    EvalContext ctx;
    eval(fx.mat, fx.q, ctx);
    eval_backward(fx.mat, fx.q, ctx, fx.coef, twice);
    eval_backward(fx.mat, fx.q, ctx, fx.coef, twice);
    LevelBlend lb = level_blend(fx.q.sigma, fx.mat.k());
    BilinearTaps taps = bilinear_taps(fx.mat.pyramid.levels[lb.lo], ctx.p_lookup);
    Float once = fx.grads.pyramid[lb.lo].texel(taps.col[0], taps.row[0])[0];
    Float doubled = twice.pyramid[lb.lo].texel(taps.col[0], taps.row[0])[0];
    CHECK(doubled == doctest::Approx(2 * once).epsilon(1e-12));
    CHECK(twice.decoder.d_biases.back()[0] ==
          doctest::Approx(2 * fx.grads.decoder.d_biases.back()[0]).epsilon(1e-12));
}

TEST_CASE("untouched pyramid levels receive no gradient") {
    Pcg32 rng(104, 1);
    ChainFixture fx;
    REQUIRE(fx.build(true, rng));
    LevelBlend lb = level_blend(fx.q.sigma, fx.mat.k());
    for (int s = 0; s <= fx.mat.k(); ++s) {
        if (s == lb.lo || s == lb.hi)
            continue;
        for (Float g : fx.grads.pyramid[s].data)
            CHECK(g == 0.0);
    }
}
