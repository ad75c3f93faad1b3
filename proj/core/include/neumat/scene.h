// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_SCENE_H
#define NEUMAT_SCENE_H

#include <cstdint>
#include <string>

#include "neumat/vec.h"

namespace neumat {

/// A single textured plane patch lit by one directional light. The plane
/// spans origin + a*u + b*v for (a,b) in [0,1]^2; material uv is (a,b)
/// scaled by the tiling factor. Directions handed to the material are
/// expressed in the plane's tangent frame (u_hat, n x u_hat, n).
struct Scene {
    Vec3 camera_position{0, -2.2, 1.6};
    Vec3 camera_lookat{0, 0, 0};
    Float camera_fov = 40;  // vertical, degrees
    int width = 256;
    int height = 256;

    Vec3 plane_origin{-1, -1, 0};
    Vec3 plane_u{2, 0, 0};
    Vec3 plane_v{0, 2, 0};
    Float tiling = 1;

    Vec3 light_direction{0.35, 0.25, 1};  // toward the light, normalized on load
    Rgb light_irradiance{1, 1, 1};        // on the reference plane

    std::string material;
    int spp = 4;
    uint64_t seed = 0;
};

/// Unit plane normal, oriented by the u/v winding.
Vec3 scene_plane_normal(const Scene &scene);

/// Checks geometry: non-degenerate plane basis, camera above the plane,
/// light in the upper hemisphere, positive image dimensions and spp.
/// Throws std::invalid_argument on violation.
void validate_scene(const Scene &scene);

/// Parses a flat key-value scene file (keys camera.*, plane.*, light.*,
/// material, spp, seed); unlisted keys are rejected. Fields absent from
/// the file keep the defaults above. The result is validated.
Scene load_scene(const std::string &path);

}  // namespace neumat

#endif  // NEUMAT_SCENE_H
