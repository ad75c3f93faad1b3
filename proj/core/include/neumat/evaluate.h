// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_EVALUATE_H
#define NEUMAT_EVALUATE_H

#include <vector>

#include "neumat/dataset.h"
#include "neumat/material.h"
#include "neumat/oracle.h"

namespace neumat {

/// Mean per-record loss of the material over every dataset record. This is
/// the quantity trainers report as the final loss and `eval` prints.
Float dataset_mse(const MbtfMaterial &mat, const QueryDataset &ds, bool baseline,
                  int threads);

struct LodBucket {
    int level = 0;
    Float sigma = 0;
    Float mse = 0;           // against fresh MC oracle targets
    Float debiased_mse = 0;  // mse minus the targets' estimated MC variance
    int64_t count = 0;
};

/// Per-level accuracy sweep: for each level s in [1, k] draws per_level
/// fresh queries pinned at sigma = 2^-s (p uniform, directions
/// cosine-weighted), scores the material against mbtf_oracle targets, and
/// reports the raw MSE plus a debiased value that subtracts the oracle
/// estimator's own variance so level-to-level comparisons are not skewed by
/// MC noise in the references. Level 0 is excluded: training sigmas never
/// reach it (sigma <= 1/2 keeps the LOD at or above 1).
std::vector<LodBucket> lod_sweep(const MbtfMaterial &mat, const Heightfield &hf,
                                 const OracleOptions &opt, int per_level,
                                 uint64_t seed, bool baseline, int threads);

}  // namespace neumat

#endif  // NEUMAT_EVALUATE_H
