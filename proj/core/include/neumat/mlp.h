// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_MLP_H
#define NEUMAT_MLP_H

#include <cstdint>
#include <vector>

#include "neumat/vec.h"

namespace neumat {

/// Fixed-architecture fully connected network with explicit forward and
/// reverse-mode backward passes. Hidden layers use ReLU; the final layer
/// applies ReLU iff final_relu (the reflectance decoder clamps its output
/// non-negative, the ray-depth regressor does not).
///
/// Layer i maps dims[i] -> dims[i+1] with weight matrix stored row-major by
/// input: weights[i][in * dims[i+1] + out].
struct Mlp {
    std::vector<int> dims;
    std::vector<std::vector<Float>> weights;  // one flat matrix per layer
    std::vector<std::vector<Float>> biases;   // one vector per layer
    bool final_relu = true;

    int num_layers() const { return static_cast<int>(dims.size()) - 1; }
    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
};

/// Sum over layers of (n_in + 1) * n_out.
int64_t param_count(const Mlp &m);

/// Fan-in scaled uniform init, +/- sqrt(6 / n_in); biases zero.
/// Bit-reproducible for a given seed.
Mlp mlp_init(const std::vector<int> &dims, bool final_relu, uint64_t seed);

/// Per-layer activations captured by the forward pass for reuse in backward.
struct MlpCache {
    std::vector<std::vector<Float>> act;  // act[0] = input, act[i] = output of layer i-1
    std::vector<std::vector<Float>> pre;  // pre-activation per layer

    void resize(const Mlp &m);
};

struct MlpGrads {
    std::vector<std::vector<Float>> d_weights;
    std::vector<std::vector<Float>> d_biases;

    void resize_like(const Mlp &m);
    void clear();
};

/// Alternating affine + ReLU chain. input length must equal dims.front();
/// writes dims.back() values to out. The cache records everything backward
/// needs.
void mlp_forward(const Mlp &m, const Float *input, Float *out, MlpCache &cache);

/// Standard backprop through the cached forward pass. Accumulates parameter
/// gradients into grads (+=) and, when d_input is non-null, writes the
/// gradient with respect to the input vector. The ReLU subgradient at 0 is 0.
void mlp_backward(const Mlp &m, const MlpCache &cache, const Float *upstream,
                  MlpGrads &grads, Float *d_input);

}  // namespace neumat

#endif  // NEUMAT_MLP_H
