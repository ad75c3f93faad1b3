// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

// Microbenchmarks for the evaluation and training hot paths. Inputs are
// randomized per iteration from a cheap counter-seeded stream so the
// optimizer cannot hoist the lookups.

#include <benchmark/benchmark.h>

#include <vector>

#include "neumat/material.h"
#include "neumat/oracle.h"
#include "neumat/pyramid.h"
#include "neumat/rng.h"
#include "neumat/texture.h"
#include "neumat/trainer.h"

using namespace neumat;

namespace {

Query random_query(int k, Pcg32 &rng) {
    Query q;
    q.p = {rng.next_double(), rng.next_double()};
    q.sigma = std::exp2(-rng.uniform(1.0, k + 1.0));
    q.wi = sample_query_direction(rng);
    q.wo = sample_query_direction(rng);
    return q;
}

QueryDataset constant_dataset(int k, int n, uint64_t seed) {
    QueryDataset ds;
    ds.k = k;
    Pcg32 rng(seed, 77);
    ds.records.reserve(n);
    for (int i = 0; i < n; ++i)
        ds.records.push_back({random_query(k, rng), Rgb(0.5 * kInvPi)});
    return ds;
}

void bm_bilinear(benchmark::State &state) {
    Pcg32 rng(1, 1);
    FeatureTexture tex(64, 7);
    for (Float &x : tex.data)
        x = rng.uniform(-1, 1);
    Float out[kMaxFeatureChannels];
    for (auto _ : state) {
        Vec2 p{rng.next_double(), rng.next_double()};
        bilinear_lookup(tex, p, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_bilinear);

void bm_trilinear(benchmark::State &state) {
    Pcg32 rng(2, 1);
    NeuralPyramid pyr(6, 7);
    for (auto &level : pyr.levels)
        for (Float &x : level.data)
            x = rng.uniform(-1, 1);
    Float out[kMaxFeatureChannels];
    for (auto _ : state) {
        Vec2 p{rng.next_double(), rng.next_double()};
        Float sigma = std::exp2(-rng.uniform(1.0, 7.0));
        trilinear_lookup(pyr, p, sigma, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_trilinear);

void bm_gaussian_blur(benchmark::State &state) {
    Pcg32 rng(3, 1);
    FeatureTexture tex(state.range(0), 7);
    for (Float &x : tex.data)
        x = rng.uniform(-1, 1);
    for (auto _ : state) {
        FeatureTexture out = gaussian_blur(tex, 4.0);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(bm_gaussian_blur)->Arg(16)->Arg(64);

void bm_mlp_forward(benchmark::State &state) {
    Mlp m = mlp_init({11, 25, 25, 25, 3}, true, 4);
    Pcg32 rng(4, 1);
    Float in[11], out[3];
    MlpCache cache;
    for (auto _ : state) {
        for (Float &x : in)
            x = rng.uniform(-1, 1);
        mlp_forward(m, in, out, cache);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_mlp_forward);

void bm_eval(benchmark::State &state) {
    MbtfMaterial mat = material_init(6, 7, 7, true, 5);
    Pcg32 rng(5, 1);
    EvalContext ctx;
    for (auto _ : state) {
        Rgb v = eval(mat, random_query(mat.k(), rng), ctx);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_eval);

void bm_eval_backward(benchmark::State &state) {
    MbtfMaterial mat = material_init(6, 7, 7, true, 6);
    Pcg32 rng(6, 1);
    EvalContext ctx;
    MaterialGrads grads;
    grads.resize_like(mat);
    for (auto _ : state) {
        Query q = random_query(mat.k(), rng);
        Rgb v = eval(mat, q, ctx);
        eval_backward(mat, q, ctx, v, grads);
        benchmark::DoNotOptimize(grads.decoder.d_weights[0].data());
    }
}
BENCHMARK(bm_eval_backward);

void bm_train_step(benchmark::State &state) {
    const int k = 4;
    QueryDataset ds = constant_dataset(k, 1 << 12, 7);
    TrainConfig cfg;
    cfg.batch_size = 1 << 12;
    cfg.blur_sigma_init = 0;
    cfg.threads = 1;
    MbtfMaterial mat = material_init(k, 7, 7, true, 8);
    AdamState opt;
    opt.resize_like(mat);
    int64_t t = 0;
    for (auto _ : state) {
        Float loss = train_step(mat, ds.records, opt, t++, cfg);
        benchmark::DoNotOptimize(loss);
    }
    state.SetItemsProcessed(state.iterations() * cfg.batch_size);
}
BENCHMARK(bm_train_step)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
