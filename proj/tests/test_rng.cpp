// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "neumat/rng.h"

using namespace neumat;

TEST_CASE("pcg32 matches the reference stream") {
    // First outputs of the canonical pcg32 for seed(42, 54).
    Pcg32 rng(42, 54);
    CHECK(rng.next_u32() == 0xa15c02b7u);
    CHECK(rng.next_u32() == 0x7b47f409u);
    CHECK(rng.next_u32() == 0xba1d3330u);
    CHECK(rng.next_u32() == 0x83d2f293u);
    CHECK(rng.next_u32() == 0xbfa4784bu);
    CHECK(rng.next_u32() == 0xcbed606eu);

    Pcg32 other(1, 1);
    CHECK(other.next_u32() == 0xc9828f91u);
    CHECK(other.next_u32() == 0x1592e274u);
}

TEST_CASE("streams with different sequence ids are independent") {
    Pcg32 a(7, 0), b(7, 1);
    int same = 0;
    for (int i = 0; i < 64; ++i)
        same += a.next_u32() == b.next_u32();
    CHECK(same == 0);
}

TEST_CASE("next_double stays in [0, 1)") {
    Pcg32 rng(3, 9);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("next_below covers the range without bias") {
    Pcg32 rng(5, 5);
    int counts[7] = {};
    const int n = 70000;
    for (int i = 0; i < n; ++i)
        counts[rng.next_below(7)]++;
    for (int c : counts) {
        CHECK(c > n / 7 - 600);
        CHECK(c < n / 7 + 600);
    }
}

TEST_CASE("next_normal has unit variance") {
    Pcg32 rng(11, 2);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = rng.next_normal();
        sum += x;
        sum2 += x * x;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}
