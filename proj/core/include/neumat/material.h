// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_MATERIAL_H
#define NEUMAT_MATERIAL_H

#include <cstdint>
#include <string>

#include "neumat/direction.h"
#include "neumat/mlp.h"
#include "neumat/offset.h"
#include "neumat/pyramid.h"

namespace neumat {

/// One reflectance request: surface point in tile fractions, filter kernel
/// radius sigma (a Gaussian standard deviation in tile fractions), and light
/// and camera directions in the projected-hemisphere encoding.
struct Query {
    Vec2 p;
    Float sigma = 0;
    Direction wi, wo;
};

/// Training provenance carried by the material file.
struct MaterialMeta {
    uint64_t iterations = 0;
    uint64_t dataset_hash = 0;
};

/// A complete material asset: the feature pyramid, the reflectance decoder,
/// and (unless trained in baseline mode) the neural offset module.
///
/// Evaluation is the composition
///   M(u, sigma, wi, wo) = F(P(u + O(u, wo), sigma), wi, wo)
/// where P is the trilinear pyramid fetch, O the neural offset, and F the
/// decoder over [feature, wi.x, wi.y, wo.x, wo.y]. The decoder ends in a
/// ReLU so reflectance is componentwise non-negative. The function is not
/// reciprocal in (wi, wo) and is not required to be.
struct MbtfMaterial {
    NeuralPyramid pyramid;
    Mlp decoder;  // [c + 4, 25, 25, 25, 3], final ReLU
    bool has_offset = false;
    OffsetModule offset;  // meaningful only when has_offset
    MaterialMeta meta;

    int k() const { return pyramid.k; }
    int channels() const { return pyramid.channels; }
    int offset_channels() const {
        return has_offset ? offset.texture.channels : 0;
    }
};

/// Per-query scratch retained for the backward pass. Reusable across
/// queries; each eval overwrites it completely.
struct EvalContext {
    MlpCache decoder_cache;
    MlpCache offset_cache;
    Vec2 p_lookup;             // pyramid coordinate actually sampled
    bool used_offset = false;  // offset stage ran (and needs gradients)
};

/// Freshly initialized material: textures are normal(0, 0.01) draws, MLPs
/// use fan-in uniform init. Deterministic in seed; every component draws
/// from its own RNG stream so layouts can change independently. c2 is
/// ignored when with_offset is false.
MbtfMaterial material_init(int k, int c, int c2, bool with_offset, uint64_t seed);

/// Total trainable scalar count: every texel channel plus both MLPs.
int64_t material_param_count(const MbtfMaterial &mat);

/// Full evaluation, offset included when the material has one.
/// Invalid directions or sigma <= 0 are contract violations.
Rgb eval(const MbtfMaterial &mat, const Query &q, EvalContext &ctx);
Rgb eval(const MbtfMaterial &mat, const Query &q);

/// Evaluation with the offset stage bypassed; identical to eval for
/// materials without an offset module.
Rgb eval_baseline(const MbtfMaterial &mat, const Query &q, EvalContext &ctx);
Rgb eval_baseline(const MbtfMaterial &mat, const Query &q);

/// Dense gradient accumulators matching one material's parameter layout.
struct MaterialGrads {
    std::vector<FeatureTexture> pyramid;  // one per level
    MlpGrads decoder;
    FeatureTexture offset_texture;
    MlpGrads offset_mlp;

    void resize_like(const MbtfMaterial &mat);
    void clear();
};

/// Reverse-mode step for one query: takes dLoss/dRGB and accumulates (+=)
/// parameter gradients for every stage that ran in the forward pass
/// recorded by ctx. q must be the query passed to that eval.
void eval_backward(const MbtfMaterial &mat, const Query &q,
                   const EvalContext &ctx, const Rgb &upstream,
                   MaterialGrads &grads);

/// Rounds every parameter through storage precision (f32) so that save and
/// load reproduce the in-memory material bit for bit.
void quantize_storage(MbtfMaterial &mat);

/// Material file, magic "NMAT": little-endian header (version, k, c, c2,
/// flags), decoder layer dims and row-major f32 weights, the offset MLP and
/// texture when present, then pyramid levels coarse to fine. An optional
/// trailer carries training provenance. Loading validates structure and
/// finiteness and reports bad magic, version, truncation, non-finite, and
/// range errors distinctly (FileFormatError).
void save_material(const MbtfMaterial &mat, const std::string &path);
MbtfMaterial load_material(const std::string &path);

}  // namespace neumat

#endif  // NEUMAT_MATERIAL_H
