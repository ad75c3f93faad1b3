// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/heightfield.h"

#include <cmath>

#include "neumat/binaryio.h"
#include "neumat/image.h"
#include "neumat/rng.h"

namespace neumat {

namespace {

int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// Taps and weights shared by the two bilinear field samplers. Texel centers
// at (i + 0.5) / resolution, wrap modulo 1.
struct FieldTaps {
    int c0, c1, r0, r1;
    Float fu, fv;
};

FieldTaps field_taps(int res, Vec2 uv) {
    Float x = uv.x * res - 0.5;
    Float y = uv.y * res - 0.5;
    Float fx = std::floor(x), fy = std::floor(y);
    FieldTaps t;
    t.fu = x - fx;
    t.fv = y - fy;
    t.c0 = wrap(static_cast<int>(fx), res);
    t.r0 = wrap(static_cast<int>(fy), res);
    t.c1 = wrap(t.c0 + 1, res);
    t.r1 = wrap(t.r0 + 1, res);
    return t;
}

}  // namespace

void Heightfield::finalize() {
    check_contract(resolution >= 1, "heightfield: bad resolution");
    check_contract(heights.size() == static_cast<size_t>(resolution) * resolution &&
                       albedo.size() == heights.size(),
                   "heightfield: grid size mismatch");
    min_height = max_height = heights[0];
    for (Float h : heights) {
        check_contract(std::isfinite(h), "heightfield: non-finite height");
        min_height = std::min(min_height, h);
        max_height = std::max(max_height, h);
    }
    for (const Rgb &a : albedo)
        for (int c = 0; c < 3; ++c)
            check_contract(a[c] >= 0 && a[c] <= 1, "heightfield: albedo outside [0,1]");
}

Float height_at(const Heightfield &hf, Vec2 uv) {
    FieldTaps t = field_taps(hf.resolution, uv);
    const int n = hf.resolution;
    const Float *h = hf.heights.data();
    Float h00 = h[static_cast<size_t>(t.r0) * n + t.c0];
    Float h10 = h[static_cast<size_t>(t.r0) * n + t.c1];
    Float h01 = h[static_cast<size_t>(t.r1) * n + t.c0];
    Float h11 = h[static_cast<size_t>(t.r1) * n + t.c1];
    return (1 - t.fv) * ((1 - t.fu) * h00 + t.fu * h10) +
           t.fv * ((1 - t.fu) * h01 + t.fu * h11);
}

Rgb albedo_at(const Heightfield &hf, Vec2 uv) {
    FieldTaps t = field_taps(hf.resolution, uv);
    const int n = hf.resolution;
    const Rgb *a = hf.albedo.data();
    return (1 - t.fv) * ((1 - t.fu) * a[static_cast<size_t>(t.r0) * n + t.c0] +
                         t.fu * a[static_cast<size_t>(t.r0) * n + t.c1]) +
           t.fv * ((1 - t.fu) * a[static_cast<size_t>(t.r1) * n + t.c0] +
                   t.fu * a[static_cast<size_t>(t.r1) * n + t.c1]);
}

Vec3 normal_at(const Heightfield &hf, Vec2 uv) {
    Float d = 0.5 / hf.resolution;
    Float dhdu = (height_at(hf, {uv.x + d, uv.y}) - height_at(hf, {uv.x - d, uv.y})) / (2 * d);
    Float dhdv = (height_at(hf, {uv.x, uv.y + d}) - height_at(hf, {uv.x, uv.y - d})) / (2 * d);
    return normalize({-dhdu, -dhdv, 1});
}

namespace {

Vec2 wrap_uv(Vec2 uv) {
    Float u = uv.x - std::floor(uv.x);
    Float v = uv.y - std::floor(uv.y);
    // floor rounding can land exactly on 1.
    if (u >= 1)
        u = 0;
    if (v >= 1)
        v = 0;
    return {u, v};
}

}  // namespace

HeightfieldHit heightfield_intersect(const Heightfield &hf, Vec3 origin, Vec3 dir) {
    check_contract(dir.z < 0, "heightfield_intersect: ray must descend");
    check_contract(origin.z > height_at(hf, {origin.x, origin.y}),
                   "heightfield_intersect: origin below surface");

    const Float dt = 0.25 / hf.resolution;
    // The surface is bounded below, so the descending ray must cross it.
    const Float t_limit = (origin.z - hf.min_height) / -dir.z + 4 * dt;

    Float t_lo = 0, t = 0;
    for (;;) {
        t += dt;
        check_contract(t <= t_limit, "heightfield_intersect: march overran");
        Vec3 pos = origin + t * dir;
        if (pos.z <= height_at(hf, {pos.x, pos.y}))
            break;
        t_lo = t;
    }
    Float t_hi = t;
    for (int i = 0; i < 8; ++i) {
        Float mid = 0.5 * (t_lo + t_hi);
        Vec3 pos = origin + mid * dir;
        if (pos.z <= height_at(hf, {pos.x, pos.y}))
            t_hi = mid;
        else
            t_lo = mid;
    }

    Vec3 pos = origin + 0.5 * (t_lo + t_hi) * dir;
    HeightfieldHit hit;
    hit.uv = wrap_uv({pos.x, pos.y});
    hit.height = height_at(hf, hit.uv);
    hit.normal = normal_at(hf, hit.uv);
    return hit;
}

bool heightfield_shadowed(const Heightfield &hf, Vec3 pos, const Direction &wi) {
    Float horiz = std::sqrt(wi.x * wi.x + wi.y * wi.y);
    if (horiz < 1e-9)
        return false;  // straight up, nothing to cross
    Float ux = wi.x / horiz, uy = wi.y / horiz;
    Float slope = wi.z() / horiz;  // dz per unit horizontal travel

    // Bias keeps the ray from re-reporting its own origin texel.
    const Float bias = 0.05 / hf.resolution;
    const Float ds = 0.25 / hf.resolution;
    const Float s_max = 8;

    for (Float s = ds; s <= s_max; s += ds) {
        Float z = pos.z + slope * s;
        if (z > hf.max_height)
            return false;
        if (z < height_at(hf, {pos.x + ux * s, pos.y + uy * s}) - bias)
            return true;
    }
    return false;  // near-grazing ray that never cleared: tiny cosine anyway
}

Heightfield hf_flat(int res, Rgb albedo) {
    Heightfield hf(res, albedo);
    hf.finalize();
    return hf;
}

Heightfield hf_step(int res, Float height, Rgb albedo) {
    Heightfield hf(res, albedo);
    for (int row = 0; row < res; ++row)
        for (int col = 0; col < res; ++col) {
            Float u = (col + 0.5) / res;
            hf.height_texel(col, row) = (u >= 0.25 && u < 0.75) ? height : 0;
        }
    hf.finalize();
    return hf;
}

Heightfield hf_ramp(int res, Float amplitude, Rgb albedo) {
    Heightfield hf(res, albedo);
    for (int row = 0; row < res; ++row)
        for (int col = 0; col < res; ++col)
            hf.height_texel(col, row) = amplitude * (col + 0.5) / res;
    hf.finalize();
    return hf;
}

void checker_albedo(Heightfield &hf, int cells, Rgb a, Rgb b) {
    check_contract(cells >= 1, "checker_albedo: bad cell count");
    int res = hf.resolution;
    for (int row = 0; row < res; ++row)
        for (int col = 0; col < res; ++col) {
            int cu = static_cast<int>((col + 0.5) / res * cells);
            int cv = static_cast<int>((row + 0.5) / res * cells);
            hf.albedo_texel(col, row) = ((cu + cv) & 1) ? b : a;
        }
    hf.finalize();
}

Heightfield hf_checker(int res, int cells, Rgb a, Rgb b) {
    Heightfield hf(res);
    checker_albedo(hf, cells, a, b);
    return hf;
}

Heightfield hf_bumps(int res, int n, Float amplitude, Float radius, uint64_t seed) {
    check_contract(n >= 1 && amplitude >= 0 && radius > 0, "hf_bumps: bad parameters");
    Heightfield hf(res);
    Pcg32 rng(seed);

    struct Bump {
        Vec2 center;
        Float amp, r;
    };
    std::vector<Bump> bumps;
    bumps.reserve(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Bump b;
            b.center = {(i + 0.5) / n + rng.uniform(-0.25, 0.25) / n,
                        (j + 0.5) / n + rng.uniform(-0.25, 0.25) / n};
            b.amp = amplitude * rng.uniform(0.6, 1.0);
            b.r = radius * rng.uniform(0.7, 1.3);
            bumps.push_back(b);
        }

    for (int row = 0; row < res; ++row)
        for (int col = 0; col < res; ++col) {
            Vec2 p{(col + 0.5) / res, (row + 0.5) / res};
            Float h = 0;
            for (const Bump &b : bumps) {
                // Wrapped distance on the torus.
                Float du = std::fabs(p.x - b.center.x);
                Float dv = std::fabs(p.y - b.center.y);
                du = std::min(du, 1 - du);
                dv = std::min(dv, 1 - dv);
                Float d2 = du * du + dv * dv;
                h += b.amp * std::exp(-d2 / (2 * b.r * b.r));
            }
            hf.height_texel(col, row) = h;
        }
    hf.finalize();
    return hf;
}

Heightfield heightfield_preset(const std::string &name, int res) {
    if (name == "flat")
        return hf_flat(res, Rgb(0.5));
    if (name == "step")
        return hf_step(res, 0.1, Rgb(0.5));
    if (name == "ramp")
        return hf_ramp(res, 0.2, Rgb(0.5));
    if (name == "checker")
        return hf_checker(res, 8, Rgb(0.2), Rgb(0.8));
    if (name == "bumps") {
        Heightfield hf = hf_bumps(res, 4, 0.06, 0.08, 7);
        checker_albedo(hf, 8, {0.85, 0.55, 0.2}, {0.12, 0.2, 0.45});
        return hf;
    }
    contract_violation("unknown heightfield preset: " + name);
}

Heightfield hf_from_images(const std::string &height_png, Float height_scale,
                           const std::string &albedo_png) {
    int w = 0, h = 0;
    std::vector<Float> gray = read_png_gray16(height_png, &w, &h);
    if (w != h)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "heightfield must be square: " + height_png);
    Image alb = read_png_srgb(albedo_png);
    if (alb.width != w || alb.height != h)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "albedo dimensions disagree with heights: " + albedo_png);

    Heightfield hf(w);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            hf.height_texel(col, row) = gray[static_cast<size_t>(row) * w + col] * height_scale;
            Rgb a = alb.at(col, row);
            for (int c = 0; c < 3; ++c)
                a[c] = std::fmin(std::fmax(a[c], 0.0), 1.0);
            hf.albedo_texel(col, row) = a;
        }
    hf.finalize();
    return hf;
}

}  // namespace neumat
