// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/pyramid.h"

#include <algorithm>
#include <cmath>

namespace neumat {

Float clamp_sigma(Float sigma, int k) {
    Float lo = std::exp2(static_cast<Float>(-(k + 1)));
    return std::clamp(sigma, lo, Float{1});
}

Float level_of_detail(Float sigma, int k) {
    check_contract(sigma > 0, "level_of_detail: sigma must be positive");
    Float l = -std::log2(sigma);
    return std::clamp(l, Float{0}, static_cast<Float>(k));
}

LevelBlend level_blend(Float sigma, int k) {
    Float l = level_of_detail(sigma, k);
    LevelBlend b;
    b.lo = static_cast<int>(std::floor(l));
    b.hi = static_cast<int>(std::ceil(l));
    if (b.lo == b.hi) {
        b.w_lo = 1;
        b.w_hi = 0;
    } else {
        b.w_lo = b.hi - l;
        b.w_hi = l - b.lo;
    }
    return b;
}

void trilinear_lookup(const NeuralPyramid &pyr, Vec2 p, Float sigma, Float *out) {
    LevelBlend b = level_blend(sigma, pyr.k);
    const int c = pyr.channels;
    check_contract(c <= kMaxFeatureChannels, "trilinear_lookup: too many channels");
    bilinear_lookup(pyr.levels[b.lo], p, out);
    if (b.w_hi != 0) {
        Float hi[kMaxFeatureChannels];
        bilinear_lookup(pyr.levels[b.hi], p, hi);
        for (int i = 0; i < c; ++i)
            out[i] = b.w_lo * out[i] + b.w_hi * hi[i];
    }
}

void trilinear_backward(const NeuralPyramid &pyr, Vec2 p, Float sigma,
                        const Float *upstream, std::vector<FeatureTexture> &grads,
                        Vec2 *d_coord) {
    LevelBlend b = level_blend(sigma, pyr.k);
    const int c = pyr.channels;
    check_contract(c <= kMaxFeatureChannels, "trilinear_backward: too many channels");
    Float scaled[kMaxFeatureChannels], taps[4 * kMaxFeatureChannels];
    Vec2 total_coord{0, 0};

    auto one_level = [&](int level, Float w) {
        if (w == 0)
            return;
        for (int i = 0; i < c; ++i)
            scaled[i] = w * upstream[i];
        const FeatureTexture &tex = pyr.levels[level];
        BilinearTaps t = bilinear_taps(tex, p);
        Vec2 coord;
        bilinear_backward(tex, t, scaled, taps,
                          d_coord ? &coord : nullptr);
        accumulate_taps(grads[level], t, taps);
        if (d_coord)
            total_coord += coord;
    };

    one_level(b.lo, b.w_lo);
    if (b.hi != b.lo)
        one_level(b.hi, b.w_hi);
    if (d_coord)
        *d_coord = total_coord;
}

}  // namespace neumat
