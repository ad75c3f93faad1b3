// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_TEXTURE_H
#define NEUMAT_TEXTURE_H

#include <cstdint>
#include <vector>

#include "neumat/vec.h"

namespace neumat {

/// Upper bound on feature channels, so lookup paths can use stack buffers.
inline constexpr int kMaxFeatureChannels = 64;

/// Trainable 2D grid of latent feature vectors. Square, power-of-two
/// resolution, row-major storage (row = v, column = u), wrap-around
/// addressing in both axes. Values are unitless latent features.
struct FeatureTexture {
    int resolution = 1;             // texels per side, 2^s
    int channels = 1;               // c >= 1
    std::vector<Float> data;        // resolution^2 * channels

    FeatureTexture() = default;
    FeatureTexture(int resolution, int channels)
        : resolution(resolution), channels(channels),
          data(static_cast<size_t>(resolution) * resolution * channels, 0.0) {}

    Float *texel(int col, int row) {
        return data.data() + (static_cast<size_t>(row) * resolution + col) * channels;
    }
    const Float *texel(int col, int row) const {
        return data.data() + (static_cast<size_t>(row) * resolution + col) * channels;
    }
    size_t size() const { return data.size(); }
};

/// The four texels and weights touched by one bilinear lookup.
/// Texel centers sit at ((i + 0.5) / resolution); coordinates wrap modulo 1.
/// At exact cell boundaries the taps are taken from the lower cell (the
/// fractional offset becomes 1 rather than 0), so the coordinate derivative
/// is the lower cell's one-sided slope. The interpolated value is unchanged
/// by that convention.
struct BilinearTaps {
    int col[2];     // wrapped texel columns (u axis)
    int row[2];     // wrapped texel rows (v axis)
    Float fu, fv;   // fractional offsets within the cell, in (0, 1]
    int resolution;

    // weight(a, b) multiplies texel(col[a], row[b])
    Float weight(int a, int b) const {
        Float wu = a == 0 ? 1 - fu : fu;
        Float wv = b == 0 ? 1 - fv : fv;
        return wu * wv;
    }
};

BilinearTaps bilinear_taps(const FeatureTexture &tex, Vec2 p);

/// 4-tap bilinear blend of the texels surrounding p. Periodic with period 1
/// in both axes and continuous across tile seams. Writes `channels` values
/// to out.
void bilinear_lookup(const FeatureTexture &tex, Vec2 p, Float *out);

/// Gradient of one bilinear lookup.
/// d_texels receives upstream scaled by each tap weight, laid out as
/// [tap00, tap10, tap01, tap11] x channels (tap order matches
/// BilinearTaps::weight(a, b) with a fastest). d_coord is the exact
/// derivative of the interpolant with respect to (u, v) dotted with upstream.
void bilinear_backward(const FeatureTexture &tex, const BilinearTaps &taps,
                       const Float *upstream, Float *d_texels, Vec2 *d_coord);

/// Scatters the tap gradients produced by bilinear_backward into a dense
/// gradient accumulator of the same shape as the texture.
void accumulate_taps(FeatureTexture &grad, const BilinearTaps &taps,
                     const Float *d_texels);

/// Separable Gaussian convolution with wrap-around boundaries. The kernel is
/// truncated at +/- ceil(3 sigma) texels and renormalized to sum 1, so the
/// per-channel mean is preserved exactly. sigma_blur is in texels;
/// sigma_blur <= 0 returns the input unchanged.
FeatureTexture gaussian_blur(const FeatureTexture &tex, Float sigma_blur);

/// Adjoint of gaussian_blur. The kernel is symmetric and the wrap-around
/// convolution is circulant, so the adjoint is the same convolution applied
/// to the upstream gradient field.
FeatureTexture blur_backward(const FeatureTexture &upstream_grad, Float sigma_blur);

/// Truncated, renormalized kernel half-width for a given sigma (texels).
int blur_kernel_radius(Float sigma_blur);

}  // namespace neumat

#endif  // NEUMAT_TEXTURE_H
