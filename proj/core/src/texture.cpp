// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/texture.h"

#include <cmath>

namespace neumat {

namespace {

inline int wrap(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

}  // namespace

BilinearTaps bilinear_taps(const FeatureTexture &tex, Vec2 p) {
    BilinearTaps t;
    t.resolution = tex.resolution;
    int res = tex.resolution;

    Float x = p.x * res - 0.5;
    Float y = p.y * res - 0.5;
    Float fx = x - std::floor(x);
    Float fy = y - std::floor(y);
    int i0 = static_cast<int>(std::floor(x));
    int j0 = static_cast<int>(std::floor(y));

    // Exact cell boundary: use the lower cell's one-sided derivative.
    if (fx == 0) { i0 -= 1; fx = 1; }
    if (fy == 0) { j0 -= 1; fy = 1; }

    t.col[0] = wrap(i0, res);
    t.col[1] = wrap(i0 + 1, res);
    t.row[0] = wrap(j0, res);
    t.row[1] = wrap(j0 + 1, res);
    t.fu = fx;
    t.fv = fy;
    return t;
}

void bilinear_lookup(const FeatureTexture &tex, Vec2 p, Float *out) {
    BilinearTaps t = bilinear_taps(tex, p);
    const int c = tex.channels;
    const Float *t00 = tex.texel(t.col[0], t.row[0]);
    const Float *t10 = tex.texel(t.col[1], t.row[0]);
    const Float *t01 = tex.texel(t.col[0], t.row[1]);
    const Float *t11 = tex.texel(t.col[1], t.row[1]);
    const Float w00 = t.weight(0, 0), w10 = t.weight(1, 0);
    const Float w01 = t.weight(0, 1), w11 = t.weight(1, 1);
    for (int i = 0; i < c; ++i)
        out[i] = w00 * t00[i] + w10 * t10[i] + w01 * t01[i] + w11 * t11[i];
}

void bilinear_backward(const FeatureTexture &tex, const BilinearTaps &t,
                       const Float *upstream, Float *d_texels, Vec2 *d_coord) {
    const int c = tex.channels;
    const Float w00 = t.weight(0, 0), w10 = t.weight(1, 0);
    const Float w01 = t.weight(0, 1), w11 = t.weight(1, 1);
    for (int i = 0; i < c; ++i) {
        d_texels[0 * c + i] = w00 * upstream[i];
        d_texels[1 * c + i] = w10 * upstream[i];
        d_texels[2 * c + i] = w01 * upstream[i];
        d_texels[3 * c + i] = w11 * upstream[i];
    }
    if (d_coord) {
        const Float *t00 = tex.texel(t.col[0], t.row[0]);
        const Float *t10 = tex.texel(t.col[1], t.row[0]);
        const Float *t01 = tex.texel(t.col[0], t.row[1]);
        const Float *t11 = tex.texel(t.col[1], t.row[1]);
        // d(out)/du = res * [(1-fv)(t10 - t00) + fv(t11 - t01)], and
        // symmetrically for v; dotted with the upstream gradient.
        Float du = 0, dv = 0;
        for (int i = 0; i < c; ++i) {
            du += upstream[i] * ((1 - t.fv) * (t10[i] - t00[i]) + t.fv * (t11[i] - t01[i]));
            dv += upstream[i] * ((1 - t.fu) * (t01[i] - t00[i]) + t.fu * (t11[i] - t10[i]));
        }
        d_coord->x = du * t.resolution;
        d_coord->y = dv * t.resolution;
    }
}

void accumulate_taps(FeatureTexture &grad, const BilinearTaps &t, const Float *d_texels) {
    const int c = grad.channels;
    Float *g00 = grad.texel(t.col[0], t.row[0]);
    Float *g10 = grad.texel(t.col[1], t.row[0]);
    Float *g01 = grad.texel(t.col[0], t.row[1]);
    Float *g11 = grad.texel(t.col[1], t.row[1]);
    for (int i = 0; i < c; ++i) {
        g00[i] += d_texels[0 * c + i];
        g10[i] += d_texels[1 * c + i];
        g01[i] += d_texels[2 * c + i];
        g11[i] += d_texels[3 * c + i];
    }
}

int blur_kernel_radius(Float sigma_blur) {
    if (sigma_blur <= 0)
        return 0;
    return static_cast<int>(std::ceil(3.0 * sigma_blur));
}

namespace {

std::vector<Float> blur_kernel(Float sigma, int radius) {
    std::vector<Float> k(2 * radius + 1);
    Float sum = 0;
    for (int d = -radius; d <= radius; ++d) {
        Float w = std::exp(-0.5 * (d * d) / (sigma * sigma));
        k[d + radius] = w;
        sum += w;
    }
    for (Float &w : k)
        w /= sum;
    return k;
}

// One separable pass along the given axis with wrap-around.
void convolve_axis(const FeatureTexture &in, FeatureTexture &out,
                   const std::vector<Float> &kernel, int radius, bool along_u) {
    const int res = in.resolution;
    const int c = in.channels;
    for (int row = 0; row < res; ++row) {
        for (int col = 0; col < res; ++col) {
            Float *dst = out.texel(col, row);
            for (int i = 0; i < c; ++i)
                dst[i] = 0;
            for (int d = -radius; d <= radius; ++d) {
                int sc = col, sr = row;
                if (along_u)
                    sc = wrap(col + d, res);
                else
                    sr = wrap(row + d, res);
                const Float *src = in.texel(sc, sr);
                Float w = kernel[d + radius];
                for (int i = 0; i < c; ++i)
                    dst[i] += w * src[i];
            }
        }
    }
}

}  // namespace

FeatureTexture gaussian_blur(const FeatureTexture &tex, Float sigma_blur) {
    int radius = blur_kernel_radius(sigma_blur);
    if (radius == 0)
        return tex;
    std::vector<Float> kernel = blur_kernel(sigma_blur, radius);
    FeatureTexture tmp(tex.resolution, tex.channels);
    FeatureTexture out(tex.resolution, tex.channels);
    convolve_axis(tex, tmp, kernel, radius, /*along_u=*/true);
    convolve_axis(tmp, out, kernel, radius, /*along_u=*/false);
    return out;
}

FeatureTexture blur_backward(const FeatureTexture &upstream_grad, Float sigma_blur) {
    return gaussian_blur(upstream_grad, sigma_blur);
}

}  // namespace neumat
