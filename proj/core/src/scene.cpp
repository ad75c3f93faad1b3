// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/scene.h"

#include <cmath>

#include "neumat/keyvalue.h"

namespace neumat {

Vec3 scene_plane_normal(const Scene &scene) {
    Vec3 n = cross(scene.plane_u, scene.plane_v);
    Float len = std::sqrt(dot(n, n));
    check_contract(len > 1e-12, "scene: degenerate plane basis");
    return n / len;
}

void validate_scene(const Scene &scene) {
    check_contract(is_finite(scene.camera_position) && is_finite(scene.camera_lookat),
                   "scene: non-finite camera");
    check_contract(scene.camera_fov > 0 && scene.camera_fov < 180,
                   "scene: camera.fov must be in (0, 180)");
    check_contract(scene.width >= 1 && scene.height >= 1,
                   "scene: image dimensions must be positive");
    check_contract(scene.width <= (1 << 14) && scene.height <= (1 << 14),
                   "scene: image dimensions too large");
    check_contract(is_finite(scene.plane_origin) && is_finite(scene.plane_u) &&
                       is_finite(scene.plane_v),
                   "scene: non-finite plane");
    check_contract(scene.tiling > 0 && std::isfinite(scene.tiling),
                   "scene: plane.tiling must be positive");
    Vec3 n = scene_plane_normal(scene);
    Vec3 to_cam = scene.camera_position - scene.plane_origin;
    check_contract(dot(to_cam, n) > 0, "scene: camera must be above the plane");
    Vec3 look = scene.camera_lookat - scene.camera_position;
    check_contract(dot(look, look) > 1e-12, "scene: camera.lookat coincides with camera.position");
    check_contract(is_finite(scene.light_direction) &&
                       dot(scene.light_direction, scene.light_direction) > 1e-12,
                   "scene: degenerate light.direction");
    check_contract(dot(scene.light_direction, n) > 0,
                   "scene: light must be in the plane's upper hemisphere");
    check_contract(is_finite(scene.light_irradiance) && scene.light_irradiance.x >= 0 &&
                       scene.light_irradiance.y >= 0 && scene.light_irradiance.z >= 0,
                   "scene: light.irradiance must be non-negative");
    check_contract(scene.spp >= 1, "scene: spp must be >= 1");
}

Scene load_scene(const std::string &path) {
    KeyValues kv = KeyValues::from_file(path);
    Scene s;
    s.camera_position = kv.get_vec3("camera.position", s.camera_position);
    s.camera_lookat = kv.get_vec3("camera.lookat", s.camera_lookat);
    s.camera_fov = kv.get_real("camera.fov", s.camera_fov);
    s.width = (int)kv.get_int("camera.width", s.width);
    s.height = (int)kv.get_int("camera.height", s.height);
    s.plane_origin = kv.get_vec3("plane.origin", s.plane_origin);
    s.plane_u = kv.get_vec3("plane.u", s.plane_u);
    s.plane_v = kv.get_vec3("plane.v", s.plane_v);
    s.tiling = kv.get_real("plane.tiling", s.tiling);
    s.light_direction = kv.get_vec3("light.direction", s.light_direction);
    s.light_irradiance = kv.get_vec3("light.irradiance", s.light_irradiance);
    s.material = kv.get_string("material", s.material);
    s.spp = (int)kv.get_int("spp", s.spp);
    s.seed = (uint64_t)kv.get_int("seed", (int64_t)s.seed);
    kv.finish();
    validate_scene(s);
    s.light_direction = normalize(s.light_direction);
    return s;
}

}  // namespace neumat
