// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/render.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "neumat/parallel.h"
#include "neumat/pyramid.h"
#include "neumat/rng.h"

namespace neumat {

namespace {

struct Ray {
    Vec3 o;
    Vec3 d;  // not necessarily unit length
};

struct CameraFrame {
    Vec3 pos, fwd, right, up;
    Float tan_half;
    Float aspect;
    int width, height;
};

CameraFrame make_camera(const Scene &s) {
    CameraFrame c;
    c.pos = s.camera_position;
    c.fwd = normalize(s.camera_lookat - s.camera_position);
    Vec3 r = cross(c.fwd, Vec3{0, 0, 1});
    if (dot(r, r) < 1e-12) r = cross(c.fwd, Vec3{0, 1, 0});
    c.right = normalize(r);
    c.up = cross(c.right, c.fwd);
    c.tan_half = std::tan(0.5 * s.camera_fov * std::numbers::pi_v<double> / 180);
    c.aspect = Float(s.width) / Float(s.height);
    c.width = s.width;
    c.height = s.height;
    return c;
}

// sx in [0, width), sy in [0, height), y growing downward.
Ray camera_ray(const CameraFrame &c, Float sx, Float sy) {
    Float ndc_x = (2 * sx / c.width - 1) * c.aspect * c.tan_half;
    Float ndc_y = (1 - 2 * sy / c.height) * c.tan_half;
    return {c.pos, c.fwd + ndc_x * c.right + ndc_y * c.up};
}

struct PlaneFrame {
    Vec3 origin, eu, ev;
    Vec3 n;       // unit normal
    Vec3 t0, t1;  // orthonormal tangent frame, t0 along eu
    Float inv[2][2];  // inverse Gram matrix of (eu, ev)
};

PlaneFrame make_plane(const Scene &s) {
    PlaneFrame p;
    p.origin = s.plane_origin;
    p.eu = s.plane_u;
    p.ev = s.plane_v;
    p.n = scene_plane_normal(s);
    p.t0 = normalize(p.eu);
    p.t1 = cross(p.n, p.t0);
    Float uu = dot(p.eu, p.eu), uv = dot(p.eu, p.ev), vv = dot(p.ev, p.ev);
    Float det = uu * vv - uv * uv;
    check_contract(det > 1e-12, "render: degenerate plane basis");
    p.inv[0][0] = vv / det;
    p.inv[0][1] = -uv / det;
    p.inv[1][0] = -uv / det;
    p.inv[1][1] = uu / det;
    return p;
}

Vec2 plane_params(const PlaneFrame &p, const Vec3 &point) {
    Vec3 e = point - p.origin;
    Float b0 = dot(e, p.eu), b1 = dot(e, p.ev);
    return {p.inv[0][0] * b0 + p.inv[0][1] * b1,
            p.inv[1][0] * b0 + p.inv[1][1] * b1};
}

// Front-side intersection with the infinite plane.
bool plane_hit(const PlaneFrame &p, const Ray &ray, Float *t, Vec2 *ab) {
    Float denom = dot(ray.d, p.n);
    if (denom >= -1e-12) return false;
    Float tt = dot(p.origin - ray.o, p.n) / denom;
    if (!(tt > 0)) return false;
    *t = tt;
    *ab = plane_params(p, ray.o + tt * ray.d);
    return true;
}

Direction to_local(const PlaneFrame &p, const Vec3 &w) {
    return {dot(w, p.t0), dot(w, p.t1)};
}

// Pulls a direction inside the horizon rim so that z >= min_z.
Direction clamp_rim(const Direction &d, Float min_z) {
    Float r2 = d.x * d.x + d.y * d.y;
    Float max_r2 = 1 - min_z * min_z;
    if (r2 <= max_r2) return d;
    Float s = std::sqrt(max_r2 / r2);
    return {d.x * s, d.y * s};
}

// |d(uv)/d(pixel)| by differentiating the projection analytically: with an
// unnormalized ray direction d(x), the hit point is o + s d, s = h / <d, n>,
// so dhit/dx = s' d + s d' with s' = -s <d', n> / <d, n>.
Float analytic_uv_derivative(const PlaneFrame &p, const Ray &ray, const Vec3 &ddir,
                             Float tiling) {
    Float denom = dot(ray.d, p.n);
    if (std::fabs(denom) < 1e-12) return 0;
    Float s = dot(p.origin - ray.o, p.n) / denom;
    if (!(s > 0)) return 0;
    Vec3 dhit = s * ddir - (s * dot(ddir, p.n) / denom) * ray.d;
    Vec2 dab = plane_params(p, p.origin + dhit);  // linear map, origin cancels
    dab = dab * tiling;
    return std::sqrt(dab.x * dab.x + dab.y * dab.y);
}

Float axis_uv_derivative(const PlaneFrame &p, const Ray &center, const Vec2 &uv_center,
                         const Ray &offset, const Vec3 &ddir, Float tiling) {
    Float t;
    Vec2 ab;
    if (plane_hit(p, offset, &t, &ab)) {
        Vec2 d = (ab - uv_center) * tiling;
        return std::sqrt(d.x * d.x + d.y * d.y);
    }
    return analytic_uv_derivative(p, center, ddir, tiling);
}

struct FootprintContext {
    CameraFrame cam;
    PlaneFrame plane;
    Float tiling;
};

Float footprint_raw(const FootprintContext &fc, int px, int py) {
    Ray center = camera_ray(fc.cam, px + 0.5, py + 0.5);
    Float t;
    Vec2 ab;
    if (!plane_hit(fc.plane, center, &t, &ab)) return 0;
    Ray rx = camera_ray(fc.cam, px + 1.5, py + 0.5);
    Ray ry = camera_ray(fc.cam, px + 0.5, py + 1.5);
    Vec3 ddx = (2 * fc.cam.aspect * fc.cam.tan_half / fc.cam.width) * fc.cam.right;
    Vec3 ddy = (-2 * fc.cam.tan_half / fc.cam.height) * fc.cam.up;
    Float gx = axis_uv_derivative(fc.plane, center, ab, rx, ddx, fc.tiling);
    Float gy = axis_uv_derivative(fc.plane, center, ab, ry, ddy, fc.tiling);
    return 0.5 * std::max(gx, gy);
}

struct PixelSample {
    Vec2 uv;        // material uv (tiled plane params)
    Vec3 point;     // world-space hit
    bool hit;
};

// Sub-pixel jitters are drawn up front so neural and reference renders
// see identical sample positions from the shared per-pixel stream.
void pixel_samples(const FootprintContext &fc, int px, int py, int spp,
                   Pcg32 &rng, std::vector<PixelSample> *out) {
    out->clear();
    std::vector<Vec2> jit(spp);
    for (int s = 0; s < spp; ++s) {
        jit[s].x = rng.next_double();
        jit[s].y = rng.next_double();
    }
    for (int s = 0; s < spp; ++s) {
        Ray ray = camera_ray(fc.cam, px + jit[s].x, py + jit[s].y);
        Float t = 0;
        Vec2 ab;
        PixelSample ps;
        ps.hit = plane_hit(fc.plane, ray, &t, &ab) && ab.x >= 0 && ab.x <= 1 &&
                 ab.y >= 0 && ab.y <= 1;
        ps.uv = Vec2{ab.x * fc.tiling, ab.y * fc.tiling};
        ps.point = ray.o + t * ray.d;
        out->push_back(ps);
    }
}

}  // namespace

Float pixel_footprint_raw(const Scene &scene, int px, int py) {
    validate_scene(scene);
    check_contract(px >= 0 && px < scene.width && py >= 0 && py < scene.height,
                   "render: pixel out of range");
    FootprintContext fc{make_camera(scene), make_plane(scene), scene.tiling};
    return footprint_raw(fc, px, py);
}

Float pixel_footprint_sigma(const Scene &scene, int px, int py, int k) {
    return clamp_sigma(pixel_footprint_raw(scene, px, py), k);
}

Image render(const Scene &scene, const MbtfMaterial &material, const RenderOptions &opt) {
    validate_scene(scene);
    const FootprintContext fc{make_camera(scene), make_plane(scene), scene.tiling};
    const Vec3 light = normalize(scene.light_direction);
    const Direction wi = clamp_rim(to_local(fc.plane, light), kMinWoZ);
    const int64_t npixels = int64_t(scene.width) * scene.height;
    std::vector<Rgb> acc(npixels, Rgb{0, 0, 0});

    struct Pending {
        int64_t pixel;
        Query q;
    };
    parallel_chunks(npixels, opt.threads, [&](int, int64_t begin, int64_t end) {
        EvalContext ctx;
        std::vector<Pending> buf;
        std::vector<PixelSample> samples;
        auto shade = [&](const Pending &pq) {
            Rgb v = opt.baseline ? eval_baseline(material, pq.q, ctx)
                                 : eval(material, pq.q, ctx);
            acc[pq.pixel] += v;
        };
        auto flush = [&]() {
            for (const Pending &pq : buf) shade(pq);
            buf.clear();
        };
        for (int64_t pixel = begin; pixel < end; ++pixel) {
            int px = int(pixel % scene.width);
            int py = int(pixel / scene.width);
            Float sigma = clamp_sigma(footprint_raw(fc, px, py), material.k());
            Pcg32 rng((uint64_t)scene.seed, (uint64_t)pixel);
            pixel_samples(fc, px, py, scene.spp, rng, &samples);
            for (const PixelSample &ps : samples) {
                if (!ps.hit) continue;
                Vec3 wo_world = normalize(fc.cam.pos - ps.point);
                Direction wo = clamp_rim(to_local(fc.plane, wo_world), kMinWoZ);
                Pending pq{pixel, Query{ps.uv, sigma, wi, wo}};
                if (opt.batch_size <= 0) {
                    shade(pq);
                } else {
                    buf.push_back(pq);
                    if ((int)buf.size() >= opt.batch_size) flush();
                }
            }
        }
        flush();
    });

    Image img(scene.width, scene.height);
    for (int64_t i = 0; i < npixels; ++i)
        img.pixels[i] = (acc[i] / Float(scene.spp)) * scene.light_irradiance;
    return img;
}

Image render_reference(const Scene &scene, const Heightfield &hf, int k,
                       const OracleOptions &oracle, const RenderOptions &opt) {
    validate_scene(scene);
    check_contract(k >= 0 && k <= 16, "render: pyramid depth out of range");
    const FootprintContext fc{make_camera(scene), make_plane(scene), scene.tiling};
    const Vec3 light = normalize(scene.light_direction);
    const Direction wi = clamp_rim(to_local(fc.plane, light), kMinWoZ);
    const int64_t npixels = int64_t(scene.width) * scene.height;
    std::vector<Rgb> acc(npixels, Rgb{0, 0, 0});

    parallel_chunks(npixels, opt.threads, [&](int, int64_t begin, int64_t end) {
        std::vector<PixelSample> samples;
        for (int64_t pixel = begin; pixel < end; ++pixel) {
            int px = int(pixel % scene.width);
            int py = int(pixel / scene.width);
            Float sigma = clamp_sigma(footprint_raw(fc, px, py), k);
            Pcg32 rng((uint64_t)scene.seed, (uint64_t)pixel);
            pixel_samples(fc, px, py, scene.spp, rng, &samples);
            for (const PixelSample &ps : samples) {
                if (!ps.hit) continue;
                Vec3 wo_world = normalize(fc.cam.pos - ps.point);
                Direction wo = clamp_rim(to_local(fc.plane, wo_world), kMinWoZ);
                acc[pixel] += mbtf_oracle(hf, ps.uv, sigma, wi, wo, oracle, rng);
            }
        }
    });

    Image img(scene.width, scene.height);
    for (int64_t i = 0; i < npixels; ++i)
        img.pixels[i] = (acc[i] / Float(scene.spp)) * scene.light_irradiance;
    return img;
}

}  // namespace neumat
