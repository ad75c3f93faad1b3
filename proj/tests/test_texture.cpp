// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "neumat/rng.h"
#include "neumat/texture.h"
#include "support.h"

using namespace neumat;
using namespace neumat::test;

namespace {

FeatureTexture ramp_2x2() {
    // texel(col, row): (0,0)=0 (1,0)=1 (0,1)=2 (1,1)=3
    FeatureTexture t(2, 1);
    t.texel(0, 0)[0] = 0;
    t.texel(1, 0)[0] = 1;
    t.texel(0, 1)[0] = 2;
    t.texel(1, 1)[0] = 3;
    return t;
}

Float lookup1(const FeatureTexture &t, Vec2 p) {
    Float v;
    bilinear_lookup(t, p, &v);
    return v;
}

}  // namespace

TEST_CASE("bilinear interpolates texel centers and midpoints") {
    FeatureTexture t = ramp_2x2();
    // Texel centers reproduce texel values exactly.
    CHECK(lookup1(t, {0.25, 0.25}) == 0.0);
    CHECK(lookup1(t, {0.75, 0.25}) == 1.0);
    CHECK(lookup1(t, {0.25, 0.75}) == 2.0);
    // The tile center blends all four texels equally.
    CHECK(lookup1(t, {0.5, 0.5}) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("bilinear is periodic") {
    FeatureTexture t = ramp_2x2();
    Pcg32 rng(1, 1);
    for (int i = 0; i < 32; ++i) {
        Vec2 p{rng.next_double(), rng.next_double()};
        Float base = lookup1(t, p);
        CHECK(lookup1(t, {p.x + 1, p.y}) == doctest::Approx(base).epsilon(1e-12));
        CHECK(lookup1(t, {p.x, p.y + 3}) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("bilinear is continuous across the seam") {
    FeatureTexture t(4, 1);
    Pcg32 rng(2, 1);
    for (size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = rng.uniform(-1, 1);
    // Approach u = 0 from both sides; wrap makes the limits agree.
    Float lo = lookup1(t, {1 - 1e-9, 0.4});
    Float hi = lookup1(t, {0.0, 0.4});
    CHECK(lo == doctest::Approx(hi).epsilon(1e-6));
}

TEST_CASE("bilinear tap weights sum to one") {
    FeatureTexture t(8, 1);
    Pcg32 rng(3, 1);
    for (int i = 0; i < 32; ++i) {
        BilinearTaps taps = bilinear_taps(t, {rng.uniform(-2, 2), rng.uniform(-2, 2)});
        Float w = taps.weight(0, 0) + taps.weight(1, 0) + taps.weight(0, 1) +
                  taps.weight(1, 1);
        CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(taps.fu > 0);
        CHECK(taps.fu <= 1);
        CHECK(taps.fv > 0);
        CHECK(taps.fv <= 1);
    }
}

TEST_CASE("bilinear_backward matches finite differences") {
    Pcg32 rng(4, 1);
    for (int iter = 0; iter < 8; ++iter) {
        FeatureTexture t(4, 2);
        for (size_t i = 0; i < t.data.size(); ++i)
            t.data[i] = rng.uniform(-1, 1);
        Vec2 p{rng.next_double(), rng.next_double()};
        Float up[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};

        auto loss = [&]() {
            Float out[2];
            bilinear_lookup(t, p, out);
            return up[0] * out[0] + up[1] * out[1];
        };

        BilinearTaps taps = bilinear_taps(t, p);
        Float d_texels[8];
        Vec2 d_coord;
        bilinear_backward(t, taps, up, d_texels, &d_coord);

        // Texel gradients, via the dense accumulator.
        FeatureTexture grad(4, 2);
        accumulate_taps(grad, taps, d_texels);
        for (size_t i = 0; i < t.data.size(); ++i) {
            Float fd = central_diff(loss, &t.data[i], 1e-4);
            CHECK(rel_gap(grad.data[i], fd) < 1e-6);
        }

        // Coordinate gradient (skip near cell boundaries where the
        // interpolant is only one-sided differentiable).
        if (taps.fu > 1e-3 && taps.fu < 1 - 1e-3 && taps.fv > 1e-3 &&
            taps.fv < 1 - 1e-3) {
            Float fdu = central_diff(loss, &p.x, 1e-6);
            Float fdv = central_diff(loss, &p.y, 1e-6);
            CHECK(rel_gap(d_coord.x, fdu) < 1e-5);
            CHECK(rel_gap(d_coord.y, fdv) < 1e-5);
        }
    }
}

TEST_CASE("cell boundaries use the lower cell's one-sided derivative") {
    FeatureTexture t = ramp_2x2();
    // u exactly on the boundary between texel 0 and texel 1 cells.
    BilinearTaps taps = bilinear_taps(t, {0.25, 0.4});
    CHECK(taps.fu == 1.0);
    CHECK(taps.col[0] == 1);  // wrapped lower neighbor
    CHECK(taps.col[1] == 0);
}

TEST_CASE("blur keeps constants and the mean") {
    FeatureTexture t(8, 1);
    for (size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = 0.75;
    FeatureTexture b = gaussian_blur(t, 1.3);
    for (size_t i = 0; i < b.data.size(); ++i)
        CHECK(b.data[i] == doctest::Approx(0.75).epsilon(1e-12));

    Pcg32 rng(5, 1);
    for (size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = rng.uniform(-1, 1);
    Float mean0 = 0, mean1 = 0;
    FeatureTexture b2 = gaussian_blur(t, 2.0);
    for (size_t i = 0; i < t.data.size(); ++i) {
        mean0 += t.data[i];
        mean1 += b2.data[i];
    }
    CHECK(mean0 == doctest::Approx(mean1).epsilon(1e-9));
}

TEST_CASE("blur is the identity for sigma <= 0") {
    FeatureTexture t(4, 3);
    Pcg32 rng(6, 1);
    for (size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = rng.uniform(-1, 1);
    FeatureTexture b = gaussian_blur(t, 0.0);
    CHECK(b.data == t.data);
}

TEST_CASE("blur kernel radius truncates at three sigmas") {
    CHECK(blur_kernel_radius(1.0) == 3);
    CHECK(blur_kernel_radius(1.5) == 5);
    CHECK(blur_kernel_radius(8.0) == 24);
    CHECK(blur_kernel_radius(0.0) == 0);
}

TEST_CASE("blur_backward is the adjoint of gaussian_blur") {
    Pcg32 rng(7, 1);
    for (Float sigma : {0.4, 1.0, 2.3}) {
        FeatureTexture x(8, 2), y(8, 2);
        for (size_t i = 0; i < x.data.size(); ++i) {
            x.data[i] = rng.uniform(-1, 1);
            y.data[i] = rng.uniform(-1, 1);
        }
        FeatureTexture bx = gaussian_blur(x, sigma);
        FeatureTexture by = blur_backward(y, sigma);
        Float lhs = 0, rhs = 0;
        for (size_t i = 0; i < x.data.size(); ++i) {
            lhs += bx.data[i] * y.data[i];
            rhs += x.data[i] * by.data[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("blur wraps around the tile") {
    // A delta near the edge spills onto the opposite side.
    FeatureTexture t(8, 1);
    t.texel(0, 4)[0] = 1;
    FeatureTexture b = gaussian_blur(t, 1.0);
    CHECK(b.texel(7, 4)[0] > 0);
    CHECK(b.texel(1, 4)[0] > 0);
    CHECK(b.texel(7, 4)[0] == doctest::Approx(b.texel(1, 4)[0]).epsilon(1e-12));
}
