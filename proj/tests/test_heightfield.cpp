// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "neumat/heightfield.h"
#include "neumat/rng.h"
#include "support.h"

using namespace neumat;
using namespace neumat::test;

TEST_CASE("flat field samples") {
    Heightfield hf = hf_flat(16, Rgb(0.5));
    CHECK(height_at(hf, {0.3, 0.9}) == 0.0);
    CHECK(hf.min_height == 0.0);
    CHECK(hf.max_height == 0.0);
    Vec3 n = normal_at(hf, {0.7, 0.2});
    CHECK(n.x == 0.0);
    CHECK(n.y == 0.0);
    CHECK(n.z == 1.0);
    Rgb a = albedo_at(hf, {0.1, 0.1});
    CHECK(a.x == 0.5);
}

TEST_CASE("fields wrap") {
    Heightfield hf = hf_bumps(32, 3, 0.05, 0.1, 4);
    Pcg32 rng(1, 1);
    for (int i = 0; i < 16; ++i) {
        Vec2 p{rng.next_double(), rng.next_double()};
        CHECK(height_at(hf, {p.x + 1, p.y}) ==
              doctest::Approx(height_at(hf, p)).epsilon(1e-12));
        CHECK(height_at(hf, {p.x, p.y - 2}) ==
              doctest::Approx(height_at(hf, p)).epsilon(1e-12));
    }
}

TEST_CASE("ramp normals tilt against the slope") {
    Heightfield hf = hf_ramp(64, 0.2, Rgb(0.5));
    // height = 0.2 u away from the seam; dh/du = 0.2, so n ~ (-0.2, 0, 1).
    Vec3 n = normal_at(hf, {0.5, 0.5});
    CHECK(n.x == doctest::Approx(-0.2 / std::sqrt(1.04)).epsilon(1e-3));
    CHECK(n.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(n.z == doctest::Approx(1.0 / std::sqrt(1.04)).epsilon(1e-3));
}

TEST_CASE("intersect lands on the surface") {
    Heightfield hf = hf_bumps(64, 4, 0.08, 0.09, 11);
    Pcg32 rng(2, 1);
    for (int i = 0; i < 24; ++i) {
        Vec2 p{rng.next_double(), rng.next_double()};
        Direction wo{rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
        Vec3 o{p.x, p.y, hf.max_height + 0.05};
        Vec3 d{-wo.x, -wo.y, -wo.z()};
        HeightfieldHit hit = heightfield_intersect(hf, o, d);
        CHECK(hit.uv.x >= 0);
        CHECK(hit.uv.x < 1);
        // The reported height is the surface height at the reported uv.
        CHECK(hit.height == doctest::Approx(height_at(hf, hit.uv)).epsilon(1e-9));
        // And the hit lies on the ray: reconstruct t from z travel.
        Float t = (o.z - hit.height) / -d.z;
        Float ux = o.x + t * d.x;
        Float wrapped = ux - std::floor(ux);
        CHECK(std::fabs(wrapped - hit.uv.x) * hf.resolution < 0.51);
    }
}

TEST_CASE("intersect agrees with a fine reference march") {
    Heightfield hf = hf_bumps(32, 3, 0.06, 0.12, 5);
    Pcg32 rng(3, 1);
    for (int i = 0; i < 12; ++i) {
        Vec2 p{rng.next_double(), rng.next_double()};
        Direction wo{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
        Vec3 o{p.x, p.y, hf.max_height + 0.02};
        Vec3 d = normalize(Vec3{-wo.x, -wo.y, -wo.z()});
        HeightfieldHit hit = heightfield_intersect(hf, o, d);

        // Reference: 40x finer stepping.
        Float dt = 0.25 / hf.resolution / 40;
        Float t = 0;
        while (o.z + t * d.z > height_at(hf, {o.x + t * d.x, o.y + t * d.y}))
            t += dt;
        Vec2 ref{o.x + t * d.x, o.y + t * d.y};
        Float du = std::fabs(ref.x - std::floor(ref.x) - hit.uv.x);
        du = std::min(du, 1 - du);
        Float dv = std::fabs(ref.y - std::floor(ref.y) - hit.uv.y);
        dv = std::min(dv, 1 - dv);
        CHECK(du * hf.resolution < 0.5);
        CHECK(dv * hf.resolution < 0.5);
    }
}

TEST_CASE("flat surfaces are never shadowed") {
    Heightfield hf = hf_flat(16, Rgb(0.5));
    Pcg32 rng(4, 1);
    for (int i = 0; i < 16; ++i) {
        Vec3 pos{rng.next_double(), rng.next_double(), 0.0};
        Direction wi{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        if (!wi.valid()) continue;
        CHECK(!heightfield_shadowed(hf, pos, wi));
    }
}

TEST_CASE("a plateau shadows the valley at low sun") {
    Heightfield hf = hf_step(128, 0.1, Rgb(0.5));
    // Point in the valley just past the plateau's right edge (u = 3/4),
    // light pointing back toward the plateau at shallow elevation.
    Vec3 pos{0.80, 0.5, height_at(hf, {0.80, 0.5})};
    Direction low{-0.995, 0};
    Direction high{-0.1, 0};
    CHECK(heightfield_shadowed(hf, pos, low));
    CHECK(!heightfield_shadowed(hf, pos, high));
}

TEST_CASE("shadowing is monotone in elevation") {
    Heightfield hf = hf_bumps(48, 4, 0.07, 0.1, 9);
    Pcg32 rng(5, 1);
    for (int trial = 0; trial < 8; ++trial) {
        Vec2 p{rng.next_double(), rng.next_double()};
        Vec3 pos{p.x, p.y, height_at(hf, p)};
        Float phi = rng.uniform(0, 2 * 3.14159265358979);
        // Sweep from high sun to grazing; once shadowed, stays shadowed.
        bool shadowed = false;
        for (Float r = 0.05; r < 0.999; r += 0.01) {
            bool s = heightfield_shadowed(
                hf, pos, Direction{r * std::cos(phi), r * std::sin(phi)});
            CHECK((s || !shadowed));
            shadowed = shadowed || s;
        }
    }
}

TEST_CASE("presets have documented shapes") {
    Heightfield step = heightfield_preset("step", 64);
    CHECK(height_at(step, {0.5, 0.5}) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(height_at(step, {0.05, 0.5}) == doctest::Approx(0.0).epsilon(1e-6));

    Heightfield checker = heightfield_preset("checker", 64);
    CHECK(checker.max_height == 0.0);
    Rgb c0 = albedo_at(checker, {0.01, 0.01});
    Rgb c1 = albedo_at(checker, {0.99, 0.01});
    CHECK(c0.x != c1.x);  // 8 cells: opposite parity at the two corners

    CHECK_THROWS_AS((void)heightfield_preset("nope", 32), std::invalid_argument);
}

TEST_CASE("finalize validates the grids") {
    Heightfield hf(8);
    hf.height_texel(3, 3) = 0.2;
    hf.finalize();
    CHECK(hf.max_height == doctest::Approx(0.2));
    hf.albedo_texel(1, 1).y = 1.5;
    CHECK_THROWS_AS(hf.finalize(), std::invalid_argument);
}
