// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_RENDER_H
#define NEUMAT_RENDER_H

#include "neumat/image.h"
#include "neumat/material.h"
#include "neumat/oracle.h"
#include "neumat/scene.h"

namespace neumat {

struct RenderOptions {
    int threads = 0;          // 0 = hardware concurrency
    bool deterministic = false;  // accepted for compatibility; renders are
                                 // thread-count invariant either way
    bool baseline = false;    // skip the neural offset
    int batch_size = 4096;    // query buffer drain size; 0 evaluates inline
};

/// Screen-space uv footprint radius at a pixel center, in material uv
/// units: 0.5 * max(|duv/dx|, |duv/dy|), estimated by re-intersecting
/// rays offset by one pixel and falling back to the analytic plane
/// projection derivative when an offset ray misses. Returns 0 if the
/// center ray itself misses the plane.
Float pixel_footprint_raw(const Scene &scene, int px, int py);

/// pixel_footprint_raw clamped to the sigma range of a k-level pyramid.
Float pixel_footprint_sigma(const Scene &scene, int px, int py, int k);

/// Renders the scene with a trained material. Per-pixel RNG streams make
/// the result independent of the thread count, and the batched query
/// drain is bit-identical to inline evaluation.
Image render(const Scene &scene, const MbtfMaterial &material,
             const RenderOptions &opt = {});

/// Ground-truth render of the same scene against heightfield
/// microgeometry, shading each sample with the filtered reflectance
/// oracle at the pixel's footprint sigma. k sets the sigma clamp range
/// so footprints match a k-level pyramid render.
Image render_reference(const Scene &scene, const Heightfield &hf, int k,
                       const OracleOptions &oracle, const RenderOptions &opt = {});

}  // namespace neumat

#endif  // NEUMAT_RENDER_H
