// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/material.h"

#include <cmath>

#include "neumat/binaryio.h"
#include "neumat/rng.h"

namespace neumat {

namespace {

constexpr uint32_t kMaterialVersion = 1;
constexpr uint32_t kFlagHasOffset = 1u << 0;
constexpr uint32_t kFlagProvenance = 1u << 1;
constexpr int kMaxPyramidK = 16;

// Distinct RNG streams per component, so adding or resizing one component
// never perturbs another's initialization.
constexpr uint64_t kStreamLevelBase = 100;
constexpr uint64_t kStreamOffsetTexture = 200;

void init_feature_texture(FeatureTexture &tex, Pcg32 &rng) {
    for (Float &v : tex.data)
        v = 0.01 * rng.next_normal();
}

std::vector<int> decoder_dims(int c) { return {c + 4, 25, 25, 25, 3}; }
std::vector<int> offset_dims(int c2) { return {c2 + 2, 25, 25, 25, 1}; }

}  // namespace

MbtfMaterial material_init(int k, int c, int c2, bool with_offset, uint64_t seed) {
    check_contract(k >= 0 && k <= kMaxPyramidK, "material_init: k out of range");
    check_contract(c >= 1 && c <= kMaxFeatureChannels - 4,
                   "material_init: channel count out of range");

    MbtfMaterial mat;
    mat.pyramid = NeuralPyramid(k, c);
    for (int s = 0; s <= k; ++s) {
        Pcg32 rng(seed, kStreamLevelBase + static_cast<uint64_t>(s));
        init_feature_texture(mat.pyramid.levels[s], rng);
    }
    mat.decoder = mlp_init(decoder_dims(c), true, seed + 1);

    mat.has_offset = with_offset;
    if (with_offset) {
        check_contract(c2 >= 1 && c2 <= kMaxFeatureChannels - 2,
                       "material_init: offset channel count out of range");
        mat.offset.texture = FeatureTexture(1 << k, c2);
        Pcg32 rng(seed, kStreamOffsetTexture);
        init_feature_texture(mat.offset.texture, rng);
        mat.offset.mlp = mlp_init(offset_dims(c2), false, seed + 2);
    }

    quantize_storage(mat);
    return mat;
}

int64_t material_param_count(const MbtfMaterial &mat) {
    int64_t n = param_count(mat.decoder);
    for (const FeatureTexture &t : mat.pyramid.levels)
        n += static_cast<int64_t>(t.size());
    if (mat.has_offset) {
        n += param_count(mat.offset.mlp);
        n += static_cast<int64_t>(mat.offset.texture.size());
    }
    return n;
}

namespace {

Rgb eval_impl(const MbtfMaterial &mat, const Query &q, EvalContext &ctx,
              bool use_offset) {
    check_contract(q.wi.valid() && q.wo.valid(), "eval: direction outside hemisphere");
    check_contract(is_finite(q.p), "eval: non-finite position");

    ctx.used_offset = use_offset && mat.has_offset;
    ctx.p_lookup = q.p;
    if (ctx.used_offset) {
        Float r = ray_depth(mat.offset, q.p, q.wo, ctx.offset_cache);
        ctx.p_lookup += offset_from_depth(r, q.wo);
    }

    const int c = mat.pyramid.channels;
    Float input[kMaxFeatureChannels];
    trilinear_lookup(mat.pyramid, ctx.p_lookup, q.sigma, input);
    input[c + 0] = q.wi.x;
    input[c + 1] = q.wi.y;
    input[c + 2] = q.wo.x;
    input[c + 3] = q.wo.y;

    Float out[3];
    mlp_forward(mat.decoder, input, out, ctx.decoder_cache);
    return {out[0], out[1], out[2]};
}

}  // namespace

Rgb eval(const MbtfMaterial &mat, const Query &q, EvalContext &ctx) {
    return eval_impl(mat, q, ctx, true);
}

Rgb eval(const MbtfMaterial &mat, const Query &q) {
    EvalContext ctx;
    return eval_impl(mat, q, ctx, true);
}

Rgb eval_baseline(const MbtfMaterial &mat, const Query &q, EvalContext &ctx) {
    return eval_impl(mat, q, ctx, false);
}

Rgb eval_baseline(const MbtfMaterial &mat, const Query &q) {
    EvalContext ctx;
    return eval_impl(mat, q, ctx, false);
}

void MaterialGrads::resize_like(const MbtfMaterial &mat) {
    pyramid.clear();
    pyramid.reserve(mat.pyramid.levels.size());
    for (const FeatureTexture &t : mat.pyramid.levels)
        pyramid.emplace_back(t.resolution, t.channels);
    decoder.resize_like(mat.decoder);
    if (mat.has_offset) {
        offset_texture = FeatureTexture(mat.offset.texture.resolution,
                                        mat.offset.texture.channels);
        offset_mlp.resize_like(mat.offset.mlp);
    } else {
        offset_texture = FeatureTexture();
        offset_mlp = MlpGrads();
    }
}

void MaterialGrads::clear() {
    for (FeatureTexture &t : pyramid)
        std::fill(t.data.begin(), t.data.end(), 0.0);
    decoder.clear();
    std::fill(offset_texture.data.begin(), offset_texture.data.end(), 0.0);
    offset_mlp.clear();
}

void eval_backward(const MbtfMaterial &mat, const Query &q,
                   const EvalContext &ctx, const Rgb &upstream,
                   MaterialGrads &grads) {
    Float up[3] = {upstream.x, upstream.y, upstream.z};
    Float d_input[kMaxFeatureChannels];
    mlp_backward(mat.decoder, ctx.decoder_cache, up, grads.decoder, d_input);

    // Direction slots are inputs, not parameters; only the feature part of
    // the decoder input carries gradient onward.
    Vec2 d_coord;
    trilinear_backward(mat.pyramid, ctx.p_lookup, q.sigma, d_input,
                       grads.pyramid, ctx.used_offset ? &d_coord : nullptr);
    if (ctx.used_offset)
        offset_backward(mat.offset, q.p, q.wo, ctx.offset_cache, d_coord,
                        grads.offset_texture, grads.offset_mlp);
}

namespace {

void quantize_span(std::vector<Float> &v) {
    for (Float &x : v)
        x = static_cast<Float>(static_cast<float>(x));
}

void quantize_mlp(Mlp &m) {
    for (auto &w : m.weights)
        quantize_span(w);
    for (auto &b : m.biases)
        quantize_span(b);
}

}  // namespace

void quantize_storage(MbtfMaterial &mat) {
    for (FeatureTexture &t : mat.pyramid.levels)
        quantize_span(t.data);
    quantize_mlp(mat.decoder);
    if (mat.has_offset) {
        quantize_span(mat.offset.texture.data);
        quantize_mlp(mat.offset.mlp);
    }
}

namespace {

void write_mlp(BinaryWriter &w, const Mlp &m) {
    w.u32(static_cast<uint32_t>(m.dims.size()));
    for (int d : m.dims)
        w.u32(static_cast<uint32_t>(d));
    for (int i = 0; i < m.num_layers(); ++i) {
        w.f32_array(m.weights[i].data(), m.weights[i].size());
        w.f32_array(m.biases[i].data(), m.biases[i].size());
    }
}

Mlp read_mlp(BinaryReader &r, int expect_in, int expect_out, bool final_relu) {
    uint32_t ndims = r.u32();
    if (ndims < 2 || ndims > 16)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad layer count in " + r.path());
    Mlp m;
    m.final_relu = final_relu;
    m.dims.resize(ndims);
    for (uint32_t i = 0; i < ndims; ++i) {
        uint32_t d = r.u32();
        if (d < 1 || d > 4096)
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  "bad layer width in " + r.path());
        m.dims[i] = static_cast<int>(d);
    }
    if (m.dims.front() != expect_in || m.dims.back() != expect_out)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "layer dims disagree with header in " + r.path());
    m.weights.resize(m.num_layers());
    m.biases.resize(m.num_layers());
    for (int i = 0; i < m.num_layers(); ++i) {
        m.weights[i].resize(static_cast<size_t>(m.dims[i]) * m.dims[i + 1]);
        m.biases[i].resize(m.dims[i + 1]);
        r.f32_array(m.weights[i].data(), m.weights[i].size());
        r.f32_array(m.biases[i].data(), m.biases[i].size());
    }
    return m;
}

void require_finite(const std::vector<Float> &v, const std::string &path) {
    for (Float x : v)
        if (!std::isfinite(x))
            throw FileFormatError(FormatErrorKind::NonFinite,
                                  "non-finite value in " + path);
}

void require_finite_mlp(const Mlp &m, const std::string &path) {
    for (const auto &w : m.weights)
        require_finite(w, path);
    for (const auto &b : m.biases)
        require_finite(b, path);
}

}  // namespace

void save_material(const MbtfMaterial &mat, const std::string &path) {
    require_finite_mlp(mat.decoder, path);
    for (const FeatureTexture &t : mat.pyramid.levels)
        require_finite(t.data, path);
    if (mat.has_offset) {
        require_finite_mlp(mat.offset.mlp, path);
        require_finite(mat.offset.texture.data, path);
    }

    BinaryWriter w(path);
    w.magic("NMAT");
    w.u32(kMaterialVersion);
    w.u32(static_cast<uint32_t>(mat.pyramid.k));
    w.u32(static_cast<uint32_t>(mat.pyramid.channels));
    w.u32(static_cast<uint32_t>(mat.offset_channels()));
    uint32_t flags = kFlagProvenance;
    if (mat.has_offset)
        flags |= kFlagHasOffset;
    w.u32(flags);

    write_mlp(w, mat.decoder);
    if (mat.has_offset) {
        write_mlp(w, mat.offset.mlp);
        w.f32_array(mat.offset.texture.data.data(), mat.offset.texture.size());
    }
    for (const FeatureTexture &t : mat.pyramid.levels)
        w.f32_array(t.data.data(), t.size());

    w.u64(mat.meta.iterations);
    w.u64(mat.meta.dataset_hash);
    w.close();
}

MbtfMaterial load_material(const std::string &path) {
    BinaryReader r(path);
    r.expect_magic("NMAT");
    uint32_t version = r.u32();
    if (version != kMaterialVersion)
        throw FileFormatError(FormatErrorKind::BadVersion,
                              "unsupported material version in " + path);
    uint32_t k = r.u32();
    uint32_t c = r.u32();
    uint32_t c2 = r.u32();
    uint32_t flags = r.u32();
    if (k > kMaxPyramidK || c < 1 || c > kMaxFeatureChannels - 4)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad header fields in " + path);
    bool has_offset = (flags & kFlagHasOffset) != 0;
    if (has_offset && (c2 < 1 || c2 > kMaxFeatureChannels - 2))
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad offset channel count in " + path);
    if ((flags & ~(kFlagHasOffset | kFlagProvenance)) != 0)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "unknown flags in " + path);

    MbtfMaterial mat;
    mat.decoder = read_mlp(r, static_cast<int>(c) + 4, 3, true);
    mat.has_offset = has_offset;
    if (has_offset) {
        mat.offset.mlp = read_mlp(r, static_cast<int>(c2) + 2, 1, false);
        mat.offset.texture =
            FeatureTexture(1 << k, static_cast<int>(c2));
        r.f32_array(mat.offset.texture.data.data(), mat.offset.texture.size());
    }
    mat.pyramid = NeuralPyramid(static_cast<int>(k), static_cast<int>(c));
    for (FeatureTexture &t : mat.pyramid.levels)
        r.f32_array(t.data.data(), t.size());

    if (flags & kFlagProvenance) {
        mat.meta.iterations = r.u64();
        mat.meta.dataset_hash = r.u64();
    }
    if (!r.at_eof())
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "trailing bytes in " + path);

    require_finite_mlp(mat.decoder, path);
    for (const FeatureTexture &t : mat.pyramid.levels)
        require_finite(t.data, path);
    if (mat.has_offset) {
        require_finite_mlp(mat.offset.mlp, path);
        require_finite(mat.offset.texture.data, path);
    }
    return mat;
}

}  // namespace neumat
