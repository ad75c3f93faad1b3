// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_RNG_H
#define NEUMAT_RNG_H

#include <cmath>
#include <cstdint>
#include <numbers>

namespace neumat {

// PCG32 (O'Neill). Chosen over std::mt19937 because the stdlib distributions
// are implementation-defined and results must be reproducible across
// compilers. The (state, stream) constructor gives independent sequences for
// per-record generators.
class Pcg32 {
public:
    Pcg32() { seed(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL); }
    explicit Pcg32(uint64_t initstate, uint64_t initseq = 1) { seed(initstate, initseq); }

    void seed(uint64_t initstate, uint64_t initseq) {
        state_ = 0u;
        inc_ = (initseq << 1u) | 1u;
        next_u32();
        state_ += initstate;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
    }

    // Uniform in [0, 1) with 32 bits of resolution.
    double next_double() { return next_u32() * 0x1p-32; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    uint32_t next_below(uint32_t n) {
        return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
    }

    // Standard normal via Box-Muller. One value per call; the sine branch is
    // discarded to keep the draw count per sample fixed.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        // Guard against log(0).
        u1 = u1 > 0 ? u1 : 0x1p-32;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    uint64_t state_ = 0;
    uint64_t inc_ = 0;
};

}  // namespace neumat

#endif  // NEUMAT_RNG_H
