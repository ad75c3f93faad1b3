// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_PYRAMID_H
#define NEUMAT_PYRAMID_H

#include <vector>

#include "neumat/texture.h"

namespace neumat {

/// Multi-level set of independently trained feature textures. Level s has
/// resolution 2^s for s = 0..k; all levels share the channel count. The
/// levels are not filtered copies of one another.
struct NeuralPyramid {
    int k = 0;
    int channels = 1;
    std::vector<FeatureTexture> levels;  // levels[s], s = 0..k

    NeuralPyramid() = default;
    NeuralPyramid(int k, int channels) : k(k), channels(channels) {
        levels.reserve(k + 1);
        for (int s = 0; s <= k; ++s)
            levels.emplace_back(1 << s, channels);
    }
};

/// Query footprint radius, as a Gaussian standard deviation in tile
/// fractions. Valid queries clamp into [2^-(k+1), 1].
Float clamp_sigma(Float sigma, int k);

/// Continuous pyramid coordinate for a footprint sigma:
/// l = clamp(-log2(sigma), 0, k). sigma = 1 selects the 1x1 level, sigma =
/// 2^-k the finest. Monotonically decreasing in sigma. sigma <= 0 is a
/// domain error.
Float level_of_detail(Float sigma, int k);

/// The two levels and weights blended for one query. When l is an integer
/// the blend degenerates to a single level with weight 1.
struct LevelBlend {
    int lo, hi;
    Float w_lo, w_hi;
};
LevelBlend level_blend(Float sigma, int k);

/// Trilinear feature fetch: bilinear within levels floor(l) and ceil(l),
/// linear across them in log-scale space. Writes `channels` values to out.
void trilinear_lookup(const NeuralPyramid &pyr, Vec2 p, Float sigma, Float *out);

/// Adjoint of trilinear_lookup. Distributes upstream across the <= 8
/// touched texels into per-level dense accumulators (grads[s] matching
/// levels[s] shape; untouched levels are left alone) and returns the
/// coordinate gradient as the level-weighted sum of per-level bilinear
/// coordinate gradients. sigma gets no gradient; it is an input, never
/// trained.
void trilinear_backward(const NeuralPyramid &pyr, Vec2 p, Float sigma,
                        const Float *upstream, std::vector<FeatureTexture> &grads,
                        Vec2 *d_coord);

}  // namespace neumat

#endif  // NEUMAT_PYRAMID_H
