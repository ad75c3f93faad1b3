// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <type_traits>

#include "neumat/binaryio.h"
#include "neumat/evaluate.h"
#include "neumat/parallel.h"
#include "neumat/rng.h"

namespace neumat {

Float loss(const Rgb &pred, const Rgb &target) {
    Rgb d = pred - target;
    return (d.x * d.x + d.y * d.y + d.z * d.z) / 3.0;
}

Float blur_sigma(Float t, Float sigma_init, Float half_life) {
    check_contract(t >= 0, "blur_sigma: negative iteration");
    check_contract(half_life > 0, "blur_sigma: half life must be positive");
    if (sigma_init <= 0)
        return 0;
    Float s = sigma_init * std::exp2(-t / half_life);
    return s < 0.1 ? 0 : s;
}

namespace {

constexpr Float kBeta1 = 0.9;
constexpr Float kBeta2 = 0.999;
constexpr Float kAdamEps = 1e-8;

// The canonical block order shared by the optimizer state, the parameter
// update, and the sidecar file: pyramid levels coarse to fine, decoder
// layers (weights then bias, per layer), offset texture, offset MLP layers.
template <typename Mat>
auto material_blocks(Mat &mat) {
    using VecT = std::conditional_t<std::is_const_v<Mat>,
                                    const std::vector<Float>, std::vector<Float>>;
    std::vector<VecT *> out;
    for (auto &level : mat.pyramid.levels)
        out.push_back(&level.data);
    for (int i = 0; i < mat.decoder.num_layers(); ++i) {
        out.push_back(&mat.decoder.weights[i]);
        out.push_back(&mat.decoder.biases[i]);
    }
    if (mat.has_offset) {
        out.push_back(&mat.offset.texture.data);
        for (int i = 0; i < mat.offset.mlp.num_layers(); ++i) {
            out.push_back(&mat.offset.mlp.weights[i]);
            out.push_back(&mat.offset.mlp.biases[i]);
        }
    }
    return out;
}

template <typename Grads>
auto grad_blocks(Grads &g, bool has_offset) {
    using VecT = std::conditional_t<std::is_const_v<Grads>,
                                    const std::vector<Float>, std::vector<Float>>;
    std::vector<VecT *> out;
    for (auto &level : g.pyramid)
        out.push_back(&level.data);
    for (size_t i = 0; i < g.decoder.d_weights.size(); ++i) {
        out.push_back(&g.decoder.d_weights[i]);
        out.push_back(&g.decoder.d_biases[i]);
    }
    if (has_offset) {
        out.push_back(&g.offset_texture.data);
        for (size_t i = 0; i < g.offset_mlp.d_weights.size(); ++i) {
            out.push_back(&g.offset_mlp.d_weights[i]);
            out.push_back(&g.offset_mlp.d_biases[i]);
        }
    }
    return out;
}

void accumulate_grads(MaterialGrads &into, const MaterialGrads &from, bool has_offset) {
    auto dst = grad_blocks(into, has_offset);
    auto src = grad_blocks(static_cast<const MaterialGrads &>(from), has_offset);
    for (size_t b = 0; b < dst.size(); ++b) {
        Float *d = dst[b]->data();
        const Float *s = src[b]->data();
        for (size_t i = 0; i < dst[b]->size(); ++i)
            d[i] += s[i];
    }
}

}  // namespace

void AdamState::resize_like(const MbtfMaterial &mat) {
    auto blocks = material_blocks(static_cast<const MbtfMaterial &>(mat));
    m.assign(blocks.size(), {});
    v.assign(blocks.size(), {});
    for (size_t b = 0; b < blocks.size(); ++b) {
        m[b].assign(blocks[b]->size(), 0.0);
        v[b].assign(blocks[b]->size(), 0.0);
    }
    t = 0;
}

void save_optimizer(const AdamState &st, const std::string &path) {
    BinaryWriter w(path);
    w.magic("NOPT");
    w.u32(1);
    w.u64(static_cast<uint64_t>(st.t));
    w.u32(static_cast<uint32_t>(st.m.size()));
    for (size_t b = 0; b < st.m.size(); ++b) {
        w.u64(st.m[b].size());
        w.bytes(st.m[b].data(), st.m[b].size() * sizeof(Float));
        w.bytes(st.v[b].data(), st.v[b].size() * sizeof(Float));
    }
    w.close();
}

AdamState load_optimizer(const std::string &path) {
    BinaryReader r(path);
    r.expect_magic("NOPT");
    if (r.u32() != 1)
        throw FileFormatError(FormatErrorKind::BadVersion,
                              "unsupported optimizer state version in " + path);
    AdamState st;
    st.t = static_cast<int64_t>(r.u64());
    uint32_t blocks = r.u32();
    if (blocks > 4096)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad block count in " + path);
    st.m.resize(blocks);
    st.v.resize(blocks);
    for (uint32_t b = 0; b < blocks; ++b) {
        uint64_t n = r.u64();
        if (n > (uint64_t{1} << 32))
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  "bad block size in " + path);
        st.m[b].resize(n);
        st.v[b].resize(n);
        r.bytes(st.m[b].data(), n * sizeof(Float));
        r.bytes(st.v[b].data(), n * sizeof(Float));
        for (uint64_t i = 0; i < n; ++i)
            if (!std::isfinite(st.m[b][i]) || !std::isfinite(st.v[b][i]))
                throw FileFormatError(FormatErrorKind::NonFinite,
                                      "non-finite moment in " + path);
    }
    if (!r.at_eof())
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "trailing bytes in " + path);
    return st;
}

namespace {

// Forward view for one step: every texture wide enough for the kernel
// support is blurred; parameters and narrow levels pass through.
MbtfMaterial blurred_view(const MbtfMaterial &mat, Float sb) {
    MbtfMaterial view = mat;
    int support = 2 * blur_kernel_radius(sb) + 1;
    for (auto &level : view.pyramid.levels)
        if (level.resolution >= support)
            level = gaussian_blur(level, sb);
    if (view.has_offset && view.offset.texture.resolution >= support)
        view.offset.texture = gaussian_blur(view.offset.texture, sb);
    return view;
}

void adam_update(MbtfMaterial &mat, const MaterialGrads &grads, AdamState &st,
                 Float lr) {
    auto params = material_blocks(mat);
    auto g = grad_blocks(static_cast<const MaterialGrads &>(grads), mat.has_offset);
    check_contract(params.size() == st.m.size() && params.size() == g.size(),
                   "adam_update: state does not match material");
    st.t += 1;
    Float bc1 = 1 - std::pow(kBeta1, static_cast<Float>(st.t));
    Float bc2 = 1 - std::pow(kBeta2, static_cast<Float>(st.t));
    for (size_t b = 0; b < params.size(); ++b) {
        Float *p = params[b]->data();
        const Float *gb = g[b]->data();
        Float *mb = st.m[b].data();
        Float *vb = st.v[b].data();
        size_t n = params[b]->size();
        check_contract(st.m[b].size() == n && g[b]->size() == n,
                       "adam_update: block shape mismatch");
        for (size_t i = 0; i < n; ++i) {
            mb[i] = kBeta1 * mb[i] + (1 - kBeta1) * gb[i];
            vb[i] = kBeta2 * vb[i] + (1 - kBeta2) * gb[i] * gb[i];
            Float mhat = mb[i] / bc1;
            Float vhat = vb[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
        }
    }
}

}  // namespace

Float train_step(MbtfMaterial &mat, std::span<const QueryRecord> batch,
                 AdamState &opt, int64_t t, const TrainConfig &cfg) {
    check_contract(!batch.empty(), "train_step: empty batch");

    Float sb = blur_sigma(static_cast<Float>(t), cfg.blur_sigma_init,
                          cfg.blur_half_life);
    MbtfMaterial blurred;
    const MbtfMaterial *view = &mat;
    if (sb > 0) {
        blurred = blurred_view(mat, sb);
        view = &blurred;
    }

    int workers = resolve_threads(cfg.threads);
    if (static_cast<int64_t>(batch.size()) < workers)
        workers = static_cast<int>(batch.size());
    std::vector<MaterialGrads> grads(workers);
    for (auto &g : grads)
        g.resize_like(mat);
    std::vector<double> partial(workers, 0.0);

    const bool use_offset = mat.has_offset && !cfg.baseline_only;
    const Float upstream_scale = 2.0 / (3.0 * static_cast<Float>(batch.size()));
    parallel_chunks(static_cast<int64_t>(batch.size()), workers,
                    [&](int w, int64_t begin, int64_t end) {
                        EvalContext ctx;
                        double sum = 0;
                        for (int64_t i = begin; i < end; ++i) {
                            const QueryRecord &rec = batch[i];
                            Rgb pred = use_offset
                                           ? eval(*view, rec.query, ctx)
                                           : eval_baseline(*view, rec.query, ctx);
                            sum += loss(pred, rec.target);
                            Rgb up = (pred - rec.target) * upstream_scale;
                            eval_backward(*view, rec.query, ctx, up, grads[w]);
                        }
                        partial[w] = sum;
                    });

    double batch_loss = 0;
    for (double s : partial)
        batch_loss += s;
    batch_loss /= static_cast<double>(batch.size());
    if (!std::isfinite(batch_loss)) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "training diverged: non-finite batch loss at iteration %lld "
                      "(batch size %zu, blur sigma %.4g)",
                      static_cast<long long>(t), batch.size(), sb);
        throw std::runtime_error(msg);
    }

    for (int w = 1; w < workers; ++w)
        accumulate_grads(grads[0], grads[w], mat.has_offset);

    // Gradients were taken with respect to the blurred view; the blur is a
    // symmetric circulant map, so pulling them back is one more blur.
    if (sb > 0) {
        int support = 2 * blur_kernel_radius(sb) + 1;
        for (auto &level : grads[0].pyramid)
            if (level.resolution >= support)
                level = blur_backward(level, sb);
        if (use_offset && grads[0].offset_texture.resolution >= support)
            grads[0].offset_texture = blur_backward(grads[0].offset_texture, sb);
    }

    adam_update(mat, grads[0], opt, cfg.learning_rate);
    return batch_loss;
}

TrainResult train(const QueryDataset &ds, const TrainConfig &cfg) {
    check_contract(!ds.records.empty(), "train: empty dataset");
    check_contract(ds.records.size() < (uint64_t{1} << 32), "train: dataset too large");
    check_contract(cfg.batch_size >= 1, "train: batch size must be positive");
    check_contract(cfg.iterations >= 0, "train: negative iteration count");
    check_contract(cfg.learning_rate >= 0, "train: negative learning rate");
    check_contract(cfg.blur_sigma_init >= 0 && cfg.blur_half_life > 0,
                   "train: bad blur schedule");

    TrainResult res;
    res.material = material_init(ds.k, cfg.channels, cfg.offset_channels,
                                 !cfg.baseline_only, cfg.seed);
    res.material.meta.iterations = static_cast<uint64_t>(cfg.iterations);
    res.material.meta.dataset_hash = dataset_hash(ds);

    AdamState opt;
    opt.resize_like(res.material);

    std::ofstream log;
    if (!cfg.loss_log_path.empty()) {
        log.open(cfg.loss_log_path);
        if (!log)
            throw FileFormatError(FormatErrorKind::Io,
                                  "cannot open for writing: " + cfg.loss_log_path);
    }

    Pcg32 batch_rng(cfg.seed, 300);
    const auto n = static_cast<uint32_t>(ds.records.size());
    std::vector<QueryRecord> batch(cfg.batch_size);
    res.loss_curve.reserve(cfg.iterations);

    for (int64_t t = 0; t < cfg.iterations; ++t) {
        for (auto &rec : batch)
            rec = ds.records[batch_rng.next_below(n)];
        Float L = train_step(res.material, batch, opt, t, cfg);
        res.loss_curve.push_back(L);
        res.final_batch_loss = L;
        if (log.is_open()) {
            char line[96];
            std::snprintf(line, sizeof(line), "%lld\t%.9g\t%.9g\n",
                          static_cast<long long>(t), L,
                          blur_sigma(static_cast<Float>(t), cfg.blur_sigma_init,
                                     cfg.blur_half_life));
            log << line;
        }
        if (cfg.checkpoint_interval > 0 && (t + 1) % cfg.checkpoint_interval == 0 &&
            t + 1 < cfg.iterations) {
            MbtfMaterial snap = res.material;
            quantize_storage(snap);
            std::string base =
                cfg.checkpoint_prefix + ".ckpt" + std::to_string(t + 1);
            save_material(snap, base + ".neumat");
            save_optimizer(opt, base + ".nopt");
        }
    }

    if (log.is_open()) {
        log.flush();
        if (!log)
            throw FileFormatError(FormatErrorKind::Io,
                                  "write failed: " + cfg.loss_log_path);
    }

    quantize_storage(res.material);
    res.final_dataset_mse =
        dataset_mse(res.material, ds, cfg.baseline_only, cfg.threads);
    return res;
}

}  // namespace neumat
