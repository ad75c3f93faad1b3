// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_TRAINER_H
#define NEUMAT_TRAINER_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neumat/dataset.h"
#include "neumat/material.h"

namespace neumat {

struct TrainConfig {
    int channels = 7;         // pyramid feature width c
    int offset_channels = 7;  // offset texture width c2
    int batch_size = 1 << 14;
    int64_t iterations = 30000;
    Float learning_rate = 1e-3;
    Float blur_sigma_init = 8;   // texels; 0 disables annealing entirely
    Float blur_half_life = 3333; // iterations
    uint64_t seed = 0;
    bool baseline_only = false;  // train without an offset module
    int threads = 0;             // 0 = hardware concurrency
    int64_t checkpoint_interval = 0;  // steps between checkpoints; 0 = none
    std::string checkpoint_prefix;    // path prefix for checkpoint files
    std::string loss_log_path;        // TSV loss curve; empty = not written
};

/// Mean over the three channels of the squared difference.
Float loss(const Rgb &pred, const Rgb &target);

/// Annealing schedule sigma_init * 2^(-t / half_life), in texels; values
/// below 0.1 texels return 0 (blur disabled).
Float blur_sigma(Float t, Float sigma_init, Float half_life);

/// Adam moments for every trainable block of one material, in a fixed
/// block order (pyramid levels coarse to fine, decoder layers, offset
/// texture, offset MLP layers).
struct AdamState {
    std::vector<std::vector<Float>> m, v;
    int64_t t = 0;

    void resize_like(const MbtfMaterial &mat);
};

/// Optimizer-state sidecar, magic "NOPT"; written beside checkpoints so a
/// run can be inspected or resumed. f64 payload, same error discipline as
/// the other formats.
void save_optimizer(const AdamState &st, const std::string &path);
AdamState load_optimizer(const std::string &path);

/// One optimization step at iteration t: forward and backward through
/// Gaussian-blurred views of every texture (kernel from blur_sigma(t),
/// gradients routed through the blur adjoint; levels narrower than the
/// kernel support pass through unblurred), then a single Adam update of
/// all parameter blocks. Returns the batch loss (mean of per-record
/// losses). A non-finite batch loss aborts with a diagnostic.
Float train_step(MbtfMaterial &mat, std::span<const QueryRecord> batch,
                 AdamState &opt, int64_t t, const TrainConfig &cfg);

struct TrainResult {
    MbtfMaterial material;
    Float final_batch_loss = 0;
    Float final_dataset_mse = 0;  // same definition the eval subcommand reports
    std::vector<Float> loss_curve;  // one entry per iteration
};

/// Full optimization run: initializes a material for the dataset's pyramid
/// depth, then iterates train_step over uniformly resampled batches
/// (with replacement). Deterministic for a fixed seed and thread count.
/// The returned material is quantized to storage precision, so saving and
/// reloading it reproduces final_dataset_mse exactly.
TrainResult train(const QueryDataset &ds, const TrainConfig &cfg);

}  // namespace neumat

#endif  // NEUMAT_TRAINER_H
