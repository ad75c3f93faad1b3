// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_HEIGHTFIELD_H
#define NEUMAT_HEIGHTFIELD_H

#include <cstdint>
#include <string>
#include <vector>

#include "neumat/direction.h"
#include "neumat/vec.h"

namespace neumat {

/// Tileable Lambertian microgeometry: a height grid over the unit tile
/// (values in tile fractions above the reference plane) plus an albedo
/// grid. Samples live at texel centers; both fields interpolate bilinearly
/// and wrap in u and v.
struct Heightfield {
    int resolution = 1;
    std::vector<Float> heights;  // row-major, row = v
    std::vector<Rgb> albedo;
    Float min_height = 0, max_height = 0;

    Heightfield() = default;
    explicit Heightfield(int resolution, Rgb base_albedo = Rgb(0.5))
        : resolution(resolution),
          heights(static_cast<size_t>(resolution) * resolution, 0.0),
          albedo(static_cast<size_t>(resolution) * resolution, base_albedo) {}

    Float &height_texel(int col, int row) {
        return heights[static_cast<size_t>(row) * resolution + col];
    }
    Rgb &albedo_texel(int col, int row) {
        return albedo[static_cast<size_t>(row) * resolution + col];
    }

    /// Recomputes height bounds and validates invariants (finite heights,
    /// albedo within [0, 1]). Call after mutating the grids.
    void finalize();
};

/// Bilinear wrap-around samples of the two fields.
Float height_at(const Heightfield &hf, Vec2 uv);
Rgb albedo_at(const Heightfield &hf, Vec2 uv);

/// Surface normal from central differences of the interpolated height, at
/// half-texel spacing. Flat regions return exactly (0, 0, 1).
Vec3 normal_at(const Heightfield &hf, Vec2 uv);

struct HeightfieldHit {
    Vec2 uv;  // wrapped into [0, 1)
    Float height;
    Vec3 normal;
};

/// Descending-ray intersection: fixed 0.25-texel steps along the ray until
/// it passes below the surface, then 8 bisection refinements. origin must
/// be above the surface and dir.z < 0. Always hits.
HeightfieldHit heightfield_intersect(const Heightfield &hf, Vec3 origin, Vec3 dir);

/// Shadow-ray visibility for a surface point toward light direction wi.
/// Marches in 0.25-texel horizontal steps (so the sampled uv track is the
/// same for every elevation at a fixed azimuth) until the ray climbs above
/// the maximum height. Horizontal travel is capped at a few tile lengths;
/// the cap is only reachable for near-grazing wi.
bool heightfield_shadowed(const Heightfield &hf, Vec3 pos, const Direction &wi);

// Procedural fields used by tests and the CLI presets. All deterministic.
Heightfield hf_flat(int res, Rgb albedo);
Heightfield hf_step(int res, Float height, Rgb albedo);  // plateau over u in [1/4, 3/4)
Heightfield hf_ramp(int res, Float amplitude, Rgb albedo);  // height = amplitude * u
Heightfield hf_checker(int res, int cells, Rgb a, Rgb b);   // flat, two-tone albedo
Heightfield hf_bumps(int res, int n, Float amplitude, Float radius, uint64_t seed);

/// Overwrites the albedo grid with a cells x cells checkerboard.
void checker_albedo(Heightfield &hf, int cells, Rgb a, Rgb b);

/// Named presets exposed by the CLI: flat, step, ramp, checker, bumps.
/// Unknown names are contract violations.
Heightfield heightfield_preset(const std::string &name, int res);

/// External microgeometry: 16-bit grayscale PNG heights (scaled by
/// height_scale tile fractions at full white) plus an sRGB albedo PNG of
/// the same dimensions.
Heightfield hf_from_images(const std::string &height_png, Float height_scale,
                           const std::string &albedo_png);

}  // namespace neumat

#endif  // NEUMAT_HEIGHTFIELD_H
