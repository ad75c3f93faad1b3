// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_OFFSET_H
#define NEUMAT_OFFSET_H

#include "neumat/direction.h"
#include "neumat/mlp.h"
#include "neumat/texture.h"

namespace neumat {

/// View-dependent UV re-projection: a latent texture feeds an MLP that
/// regresses a scalar ray depth, which a fixed geometric stage turns into a
/// 2D lookup offset. The texture lookup is plain bilinear at the finest
/// resolution only; the MLP has no final ReLU so the depth may carry either
/// sign.
struct OffsetModule {
    FeatureTexture texture;  // resolution = finest pyramid level, channels c2
    Mlp mlp;                 // [c2 + 2, 25, 25, 25, 1], final_relu = false
};

/// Divergence guard for the depth-to-offset stage near grazing directions.
inline constexpr Float kOffsetZMin = 0.1;

/// Regressed ray depth r at p viewed from wo, in tile fractions along the
/// view ray. May be negative.
Float ray_depth(const OffsetModule &mod, Vec2 p, const Direction &wo,
                MlpCache &cache);

/// Fixed function turning a ray depth into a UV offset:
/// delta = (r / max(wo.z, kOffsetZMin)) * (wo.x, wo.y).
/// Exact whenever wo.z >= kOffsetZMin; linear in r; parallel to (wo.x, wo.y).
Vec2 offset_from_depth(Float r, const Direction &wo);

/// p + offset_from_depth(ray_depth(p, wo), wo). The result is used in
/// wrap-around lookups, so it is not reduced modulo 1 here. At normal
/// incidence this is the identity for any module parameters.
Vec2 apply_offset(const OffsetModule &mod, Vec2 p, const Direction &wo);

/// Chain rule from an upstream gradient with respect to the offset UV back
/// to the module parameters: through the fixed stage
/// (d delta / d r = (wo.x, wo.y) / max(wo.z, kOffsetZMin)), the MLP, and the
/// bilinear texture lookup. Texture gradients accumulate into d_texture
/// (dense, same shape); MLP gradients accumulate into d_mlp. The forward
/// cache must come from the matching ray_depth call on the same (p, wo).
void offset_backward(const OffsetModule &mod, Vec2 p, const Direction &wo,
                     const MlpCache &cache, Vec2 upstream_coord_grad,
                     FeatureTexture &d_texture, MlpGrads &d_mlp);

}  // namespace neumat

#endif  // NEUMAT_OFFSET_H
