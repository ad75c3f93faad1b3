// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_ORACLE_H
#define NEUMAT_ORACLE_H

#include "neumat/dataset.h"
#include "neumat/heightfield.h"
#include "neumat/rng.h"

namespace neumat {

/// Reference-evaluation settings shared by dataset generation and reference
/// rendering.
struct OracleOptions {
    int samples = 64;        // positions averaged per MBTF query
    Float jitter_deg = 5;    // light cone half-angle; 0 keeps wi exact
    bool indirect = false;   // add one cosine-sampled indirect bounce
};

/// Viewing rays need a usable z to aim the descending march; samplers and
/// the renderer keep wo at or above this.
inline constexpr Float kMinWoZ = 1e-4;

/// Unfiltered BTF sample by explicit geometry evaluation: intersect the
/// viewing ray through (p, 0) with the microgeometry, then shade the hit as
/// a Lambertian under a distant light of unit irradiance on the reference
/// plane. On a flat field this returns exactly albedo / pi for any valid
/// directions. The rng drives light jitter and the optional bounce only.
Rgb btf_eval_oracle(const Heightfield &hf, Vec2 p, const Direction &wi,
                    const Direction &wo, const OracleOptions &opt, Pcg32 &rng);

/// Filtered (MBTF) reference: mean of btf_eval_oracle over opt.samples
/// positions drawn from an isotropic Gaussian of stddev sigma around p.
/// sigma = 0 degenerates to averaging at p itself.
Rgb mbtf_oracle(const Heightfield &hf, Vec2 p, Float sigma, const Direction &wi,
                const Direction &wo, const OracleOptions &opt, Pcg32 &rng);

/// As mbtf_oracle, and also reports the per-channel variance of the
/// returned mean (unbiased sample variance / sample count), which scoring
/// code subtracts to debias MSEs measured against noisy references.
Rgb mbtf_oracle_stats(const Heightfield &hf, Vec2 p, Float sigma,
                      const Direction &wi, const Direction &wo,
                      const OracleOptions &opt, Pcg32 &rng, Rgb *variance_of_mean);

/// Cosine-weighted direction nudged off the horizon rim so oracle viewing
/// rays always keep a usable z. The query samplers use this.
Direction sample_query_direction(Pcg32 &rng);

/// Training-set production: per_texel queries per finest-level texel with p
/// uniform over the tile, wi and wo cosine-weighted, sigma log-uniform over
/// [2^-(k+1), 2^-1], targets from mbtf_oracle. Record i draws from its own
/// (seed, i) RNG stream, so output is byte-identical for any thread count.
QueryDataset sample_queries(const Heightfield &hf, int k, int per_texel,
                            uint64_t seed, const OracleOptions &opt, int threads);

}  // namespace neumat

#endif  // NEUMAT_ORACLE_H
