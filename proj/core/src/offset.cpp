// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/offset.h"

#include <algorithm>

namespace neumat {

Float ray_depth(const OffsetModule &mod, Vec2 p, const Direction &wo,
                MlpCache &cache) {
    const int c2 = mod.texture.channels;
    check_contract(c2 + 2 <= kMaxFeatureChannels, "ray_depth: too many channels");
    Float input[kMaxFeatureChannels];
    bilinear_lookup(mod.texture, p, input);
    input[c2] = wo.x;
    input[c2 + 1] = wo.y;
    Float r;
    mlp_forward(mod.mlp, input, &r, cache);
    return r;
}

Vec2 offset_from_depth(Float r, const Direction &wo) {
    Float z = std::max(wo.z(), kOffsetZMin);
    Float scale = r / z;
    return {scale * wo.x, scale * wo.y};
}

Vec2 apply_offset(const OffsetModule &mod, Vec2 p, const Direction &wo) {
    MlpCache cache;
    Float r = ray_depth(mod, p, wo, cache);
    return p + offset_from_depth(r, wo);
}

void offset_backward(const OffsetModule &mod, Vec2 p, const Direction &wo,
                     const MlpCache &cache, Vec2 upstream_coord_grad,
                     FeatureTexture &d_texture, MlpGrads &d_mlp) {
    // d delta / d r is constant in r, so dL/dr is one dot product.
    Float z = std::max(wo.z(), kOffsetZMin);
    Float dr = (upstream_coord_grad.x * wo.x + upstream_coord_grad.y * wo.y) / z;

    Float d_input[kMaxFeatureChannels];
    mlp_backward(mod.mlp, cache, &dr, d_mlp, d_input);

    // First c2 input slots are the texture feature; the trailing direction
    // components are inputs and receive no gradient.
    Float taps[4 * kMaxFeatureChannels];
    BilinearTaps t = bilinear_taps(mod.texture, p);
    bilinear_backward(mod.texture, t, d_input, taps, nullptr);
    accumulate_taps(d_texture, t, taps);
}

}  // namespace neumat
