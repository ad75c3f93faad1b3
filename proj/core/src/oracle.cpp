// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/oracle.h"

#include <cmath>

#include "neumat/parallel.h"

namespace neumat {

namespace {

void coordinate_system(const Vec3 &n, Vec3 *t1, Vec3 *t2) {
    if (std::fabs(n.x) > std::fabs(n.y))
        *t1 = Vec3{-n.z, 0, n.x} / std::sqrt(n.x * n.x + n.z * n.z);
    else
        *t1 = Vec3{0, n.z, -n.y} / std::sqrt(n.y * n.y + n.z * n.z);
    *t2 = cross(n, *t1);
}

// Uniform direction within the solid-angle cone of half-angle theta around
// axis.
Vec3 sample_cone(const Vec3 &axis, Float theta, Pcg32 &rng) {
    Float cos_t = 1 + rng.next_double() * (std::cos(theta) - 1);
    Float sin_t = std::sqrt(std::max(Float{0}, 1 - cos_t * cos_t));
    Float phi = 2 * std::numbers::pi * rng.next_double();
    Vec3 t1, t2;
    coordinate_system(axis, &t1, &t2);
    return t1 * (sin_t * std::cos(phi)) + t2 * (sin_t * std::sin(phi)) + axis * cos_t;
}

// First surface crossing along an arbitrary ray from a surface point,
// marched in 0.25-texel horizontal steps with a small bias against
// self-intersection, then bisected. Returns false if the ray escapes above
// the terrain (or travels s_cap tile lengths without crossing).
bool trace_offset_ray(const Heightfield &hf, Vec3 pos, const Vec3 &dir,
                      Float s_cap, HeightfieldHit *hit) {
    Float horiz = std::sqrt(dir.x * dir.x + dir.y * dir.y);
    if (horiz < 1e-9)
        return false;  // vertical: self-hit or escape, both no-ops
    Float ux = dir.x / horiz, uy = dir.y / horiz;
    Float slope = dir.z / horiz;

    const Float bias = 0.05 / hf.resolution;
    const Float ds = 0.25 / hf.resolution;
    auto below = [&](Float s) {
        return pos.z + slope * s <
               height_at(hf, {pos.x + ux * s, pos.y + uy * s}) - bias;
    };

    Float s_prev = 0;
    for (Float s = ds; s <= s_cap; s += ds) {
        if (pos.z + slope * s > hf.max_height)
            return false;
        if (below(s)) {
            Float lo = s_prev, hi = s;
            for (int i = 0; i < 8; ++i) {
                Float mid = 0.5 * (lo + hi);
                (below(mid) ? hi : lo) = mid;
            }
            Float s_hit = 0.5 * (lo + hi);
            Vec2 uv{pos.x + ux * s_hit, pos.y + uy * s_hit};
            uv = {uv.x - std::floor(uv.x), uv.y - std::floor(uv.y)};
            hit->uv = uv;
            hit->height = height_at(hf, uv);
            hit->normal = normal_at(hf, uv);
            return true;
        }
        s_prev = s;
    }
    return false;
}

}  // namespace

Rgb btf_eval_oracle(const Heightfield &hf, Vec2 p, const Direction &wi,
                    const Direction &wo, const OracleOptions &opt, Pcg32 &rng) {
    check_contract(wi.valid() && wo.valid(), "oracle: direction outside hemisphere");
    check_contract(wo.z() >= kMinWoZ, "oracle: wo too close to the horizon");

    // Aim the eval ray so it passes through (p, 0) on the reference plane.
    Vec3 wo_v = wo.to_vec3();
    Float z_top = hf.max_height + 1.0 / hf.resolution;
    Float t0 = z_top / wo_v.z;
    Vec3 origin{p.x + t0 * wo_v.x, p.y + t0 * wo_v.y, z_top};
    HeightfieldHit hit = heightfield_intersect(hf, origin, wo_v * -1.0);
    Vec3 pos{hit.uv.x, hit.uv.y, hit.height};

    Vec3 wi_v = wi.to_vec3();
    if (opt.jitter_deg > 0)
        wi_v = sample_cone(wi_v, opt.jitter_deg * std::numbers::pi / 180.0, rng);
    if (wi_v.z <= 1e-9)
        return Rgb(0);  // jitter pushed the light below the horizon
    Direction wi_j{wi_v.x, wi_v.y};

    // Unit irradiance on the reference plane: perpendicular irradiance is
    // 1 / wi.z, so a flat Lambertian returns exactly albedo / pi.
    Rgb result(0);
    Float geom = std::max(Float{0}, dot(hit.normal, wi_v)) / wi_v.z;
    if (geom > 0 && !heightfield_shadowed(hf, pos, wi_j))
        result += albedo_at(hf, hit.uv) * (kInvPi * geom);

    if (opt.indirect) {
        // One cosine-sampled bounce; the (n . w) / pdf factor cancels.
        Vec3 t1, t2;
        coordinate_system(hit.normal, &t1, &t2);
        Float r = std::sqrt(rng.next_double());
        Float phi = 2 * std::numbers::pi * rng.next_double();
        Float lz = std::sqrt(std::max(Float{0}, 1 - r * r));
        Vec3 wb = t1 * (r * std::cos(phi)) + t2 * (r * std::sin(phi)) + hit.normal * lz;
        HeightfieldHit hit2;
        if (trace_offset_ray(hf, pos, wb, 8, &hit2)) {
            Vec3 pos2{hit2.uv.x, hit2.uv.y, hit2.height};
            Float geom2 = std::max(Float{0}, dot(hit2.normal, wi_v)) / wi_v.z;
            if (geom2 > 0 && !heightfield_shadowed(hf, pos2, wi_j))
                result += albedo_at(hf, hit.uv) * albedo_at(hf, hit2.uv) *
                          (kInvPi * geom2);
        }
    }
    return result;
}

Rgb mbtf_oracle_stats(const Heightfield &hf, Vec2 p, Float sigma,
                      const Direction &wi, const Direction &wo,
                      const OracleOptions &opt, Pcg32 &rng, Rgb *variance_of_mean) {
    check_contract(sigma >= 0, "mbtf_oracle: negative sigma");
    int n = std::max(1, opt.samples);
    Rgb acc(0), acc2(0);
    for (int i = 0; i < n; ++i) {
        Vec2 pj{p.x + sigma * rng.next_normal(), p.y + sigma * rng.next_normal()};
        Rgb s = btf_eval_oracle(hf, pj, wi, wo, opt, rng);
        acc += s;
        acc2 += s * s;
    }
    Rgb mean = acc / static_cast<Float>(n);
    if (variance_of_mean) {
        if (n < 2) {
            *variance_of_mean = Rgb(0);
        } else {
            // Unbiased sample variance of one draw, divided by n.
            Rgb var = (acc2 - mean * mean * static_cast<Float>(n)) /
                      static_cast<Float>(n - 1);
            for (int c = 0; c < 3; ++c)
                var[c] = std::max(Float{0}, var[c]);
            *variance_of_mean = var / static_cast<Float>(n);
        }
    }
    return mean;
}

Rgb mbtf_oracle(const Heightfield &hf, Vec2 p, Float sigma, const Direction &wi,
                const Direction &wo, const OracleOptions &opt, Pcg32 &rng) {
    return mbtf_oracle_stats(hf, p, sigma, wi, wo, opt, rng, nullptr);
}

Direction sample_query_direction(Pcg32 &rng) {
    Direction d = sample_cosine_hemisphere(rng).dir;
    Float r2 = d.x * d.x + d.y * d.y;
    const Float max_r2 = 1 - 1e-7;
    if (r2 > max_r2) {
        Float scale = std::sqrt(max_r2 / r2);
        d.x *= scale;
        d.y *= scale;
    }
    return d;
}

QueryDataset sample_queries(const Heightfield &hf, int k, int per_texel,
                            uint64_t seed, const OracleOptions &opt, int threads) {
    check_contract(k >= 0 && k <= 16, "sample_queries: k out of range");
    check_contract(per_texel >= 1, "sample_queries: per_texel must be positive");

    int64_t res = int64_t{1} << k;
    int64_t total = res * res * per_texel;
    QueryDataset ds;
    ds.k = k;
    ds.records.resize(total);

    const Float log_lo = std::log(std::ldexp(1.0, -(k + 1)));
    const Float log_hi = std::log(0.5);

    parallel_chunks(total, threads, [&](int, int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) {
            Pcg32 rng(seed, static_cast<uint64_t>(i));
            QueryRecord &rec = ds.records[i];
            rec.query.p = {rng.next_double(), rng.next_double()};
            rec.query.wi = sample_query_direction(rng);
            rec.query.wo = sample_query_direction(rng);
            rec.query.sigma = std::exp(rng.uniform(log_lo, log_hi));
            rec.target = mbtf_oracle(hf, rec.query.p, rec.query.sigma, rec.query.wi,
                                     rec.query.wo, opt, rng);
        }
    });
    return ds;
}

}  // namespace neumat
